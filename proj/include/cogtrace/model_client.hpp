#pragma once

#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace cogtrace {

// One outbound completion request. The canonical JSON form of this struct is
// the replay key, so replays are order-independent across identical requests.
struct ModelRequest {
    std::string model;
    std::string prompt;
    double temperature = 0.0;
    std::string tag;  // caller role: "annotate", "classify", "judge", "subject"
};

std::string canonical_request_json(const ModelRequest& request);

// Transport turns a request into a raw reply string. Implementations throw
// ClientError on failure.
class Transport {
public:
    virtual ~Transport() = default;
    virtual std::string complete(const ModelRequest& request) = 0;
};

struct RetryPolicy {
    int max_retries = 2;    // attempts beyond the first
    int backoff_ms = 250;   // base delay, doubled per retry
    double jitter = 0.5;    // fraction of the delay randomized away
};

struct EndpointConfig {
    std::string base_url;   // e.g. http://127.0.0.1:8080
    std::string path = "/v1/chat/completions";
    std::string api_key;
    std::string model;
    double temperature = 0.0;
    int timeout_s = 60;
    RetryPolicy retry;
};

// OpenAI-style chat-completions transport with bounded retries and jittered
// backoff on transport errors and 5xx replies.
class HttpTransport : public Transport {
public:
    explicit HttpTransport(EndpointConfig config);
    std::string complete(const ModelRequest& request) override;

private:
    EndpointConfig config_;
};

// Replays a recorded log. Identical requests are answered in recorded order;
// a request absent from the log raises ClientError.
class ReplayTransport : public Transport {
public:
    explicit ReplayTransport(const std::filesystem::path& log_path);
    std::string complete(const ModelRequest& request) override;

private:
    std::map<std::string, std::deque<std::string>> replies_;
    std::mutex mutex_;
};

// Wraps another transport and appends each request/reply pair to an
// append-only line-delimited log.
class RecordingTransport : public Transport {
public:
    RecordingTransport(std::shared_ptr<Transport> inner, const std::filesystem::path& log_path);
    std::string complete(const ModelRequest& request) override;

private:
    std::shared_ptr<Transport> inner_;
    std::filesystem::path log_path_;
    std::mutex mutex_;
};

void append_replay_record(const std::filesystem::path& log_path, const ModelRequest& request,
                          const std::string& response);

// A named model endpoint: binds model/temperature settings to a transport.
class ModelClient {
public:
    ModelClient() = default;
    ModelClient(std::shared_ptr<Transport> transport, std::string model,
                double temperature = 0.0, std::string tag = {});

    // Sends the prompt and returns the raw reply. Throws ClientError.
    std::string complete(const std::string& prompt) const;

    const std::string& model() const { return model_; }
    double temperature() const { return temperature_; }

private:
    std::shared_ptr<Transport> transport_;
    std::string model_;
    double temperature_ = 0.0;
    std::string tag_;
};

}  // namespace cogtrace
