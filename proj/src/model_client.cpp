#include "cogtrace/model_client.hpp"

#include <chrono>
#include <fstream>
#include <random>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cogtrace/errors.hpp"

namespace cogtrace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string canonical_request_json(const ModelRequest& request) {
    ordered_json obj;
    obj["model"] = request.model;
    obj["prompt"] = request.prompt;
    obj["temperature"] = request.temperature;
    obj["tag"] = request.tag;
    return obj.dump();
}

HttpTransport::HttpTransport(EndpointConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) {
        throw ClientError("endpoint base_url is empty");
    }
}

std::string HttpTransport::complete(const ModelRequest& request) {
    ordered_json body;
    body["model"] = request.model;
    body["messages"] = ordered_json::array({ordered_json{{"role", "user"},
                                                         {"content", request.prompt}}});
    body["temperature"] = request.temperature;
    const std::string payload = body.dump();

    std::mt19937 rng(std::random_device{}());
    std::string last_error;
    for (int attempt = 0; attempt <= config_.retry.max_retries; ++attempt) {
        if (attempt > 0) {
            double delay = config_.retry.backoff_ms * static_cast<double>(1 << (attempt - 1));
            std::uniform_real_distribution<double> dist(1.0 - config_.retry.jitter, 1.0);
            std::this_thread::sleep_for(
                std::chrono::milliseconds(static_cast<int64_t>(delay * dist(rng))));
        }
        httplib::Client client(config_.base_url);
        client.set_connection_timeout(config_.timeout_s, 0);
        client.set_read_timeout(config_.timeout_s, 0);
        httplib::Headers headers;
        if (!config_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        }
        auto res = client.Post(config_.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "server error: HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw ClientError("endpoint rejected request: HTTP " +
                              std::to_string(res->status) + " " + res->body);
        }
        try {
            json reply = json::parse(res->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw ClientError(std::string("malformed completion reply: ") + e.what());
        }
    }
    throw ClientError("endpoint failed after " + std::to_string(config_.retry.max_retries + 1) +
                      " attempts: " + last_error);
}

ReplayTransport::ReplayTransport(const std::filesystem::path& log_path) {
    std::ifstream in(log_path, std::ios::binary);
    if (!in) {
        throw ClientError("cannot open replay log: " + log_path.string());
    }
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            json obj = json::parse(line);
            ModelRequest req;
            const json& rj = obj.at("request");
            req.model = rj.at("model").get<std::string>();
            req.prompt = rj.at("prompt").get<std::string>();
            req.temperature = rj.at("temperature").get<double>();
            req.tag = rj.value("tag", std::string{});
            replies_[canonical_request_json(req)].push_back(
                obj.at("response").get<std::string>());
        } catch (const json::exception& e) {
            throw ClientError("replay log line " + std::to_string(line_no) +
                              " is malformed: " + e.what());
        }
    }
}

std::string ReplayTransport::complete(const ModelRequest& request) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = replies_.find(canonical_request_json(request));
    if (it == replies_.end() || it->second.empty()) {
        throw ClientError("no recorded reply for request (model=" + request.model +
                          ", tag=" + request.tag + ")");
    }
    std::string reply = it->second.front();
    it->second.pop_front();
    return reply;
}

RecordingTransport::RecordingTransport(std::shared_ptr<Transport> inner,
                                       const std::filesystem::path& log_path)
    : inner_(std::move(inner)), log_path_(log_path) {
    if (log_path_.has_parent_path()) {
        std::filesystem::create_directories(log_path_.parent_path());
    }
}

std::string RecordingTransport::complete(const ModelRequest& request) {
    std::string response = inner_->complete(request);
    std::lock_guard<std::mutex> lock(mutex_);
    append_replay_record(log_path_, request, response);
    return response;
}

void append_replay_record(const std::filesystem::path& log_path, const ModelRequest& request,
                          const std::string& response) {
    ordered_json obj;
    ordered_json rj;
    rj["model"] = request.model;
    rj["prompt"] = request.prompt;
    rj["temperature"] = request.temperature;
    rj["tag"] = request.tag;
    obj["request"] = std::move(rj);
    obj["response"] = response;
    std::ofstream out(log_path, std::ios::binary | std::ios::app);
    if (!out) {
        throw ClientError("cannot append to replay log: " + log_path.string());
    }
    out << obj.dump() << '\n';
}

ModelClient::ModelClient(std::shared_ptr<Transport> transport, std::string model,
                         double temperature, std::string tag)
    : transport_(std::move(transport)),
      model_(std::move(model)),
      temperature_(temperature),
      tag_(std::move(tag)) {}

std::string ModelClient::complete(const std::string& prompt) const {
    if (!transport_) {
        throw ClientError("model client has no transport");
    }
    ModelRequest req;
    req.model = model_;
    req.prompt = prompt;
    req.temperature = temperature_;
    req.tag = tag_;
    return transport_->complete(req);
}

}  // namespace cogtrace
