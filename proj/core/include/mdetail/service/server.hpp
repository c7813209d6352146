#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

#include "mdetail/chains/chains.hpp"
#include "mdetail/service/jobs.hpp"
#include "mdetail/service/pipeline.hpp"

namespace mdetail::service {

struct ServiceConfig {
    std::filesystem::path out_dir = "mdetail-service";
    int workers = 1;
    DetailOptions options;
};

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

using Query = std::map<std::string, std::string>;

/// The REST backend: distributions, previews, detail jobs and label edits.
/// Every handler returns a Response instead of throwing; `start`/`run` bind
/// them to an HTTP server.
class Service {
public:
    Service(std::shared_ptr<chains::NetworkSet> nets, ServiceConfig config);
    ~Service();

    Response post_distribution(const std::string& body);
    Response get_distribution(const std::string& id) const;
    /// `property`, `n` (default 4) and `seed` (default 0) query parameters.
    Response get_samples(const std::string& id, const Query& query);
    Response post_job(const std::string& body);
    Response get_job(const std::string& id) const;
    Response get_job_outputs(const std::string& id) const;
    Response get_job_file(const std::string& id, const std::string& relative) const;
    /// Body: {"facade": i, "windows": [box...], "details": [box...]}.
    Response put_labels(const std::string& building, const std::string& body);

    /// Routes a request; used by the HTTP binding and by tests.
    Response handle(const std::string& method, const std::string& path, const Query& query, const std::string& body);

    /// Serves on a background thread; port 0 picks a free port. Returns the port.
    int start(const std::string& host, int port);
    /// Serves on the calling thread until stop().
    void run(const std::string& host, int port);
    void stop();

    JobQueue& jobs() { return *jobs_; }

private:
    struct Http;

    std::shared_ptr<chains::NetworkSet> nets_;
    ServiceConfig config_;
    mutable std::shared_mutex dist_mutex_;
    std::map<std::string, style::StyleDistribution> distributions_;
    int next_distribution_ = 1;
    mutable std::mutex state_mutex_;
    std::map<std::string, BuildingState> buildings_;
    std::unique_ptr<JobQueue> jobs_;
    std::unique_ptr<Http> http_;
};

} // namespace mdetail::service
