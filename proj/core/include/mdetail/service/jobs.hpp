#pragma once

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "mdetail/scene/scene.hpp"
#include "mdetail/service/pipeline.hpp"

namespace mdetail::service {

enum class JobState { queued, running, done, failed };

std::string_view job_state_name(JobState state);

struct JobSpec {
    scene::MassModelScene scene;
    std::vector<std::size_t> blocks;
    std::string distribution;
};

struct JobStatus {
    std::string id;
    JobState state = JobState::queued;
    std::vector<std::size_t> blocks;
    std::string distribution;
    std::map<std::string, std::string> progress;  ///< building id -> current stage
    std::optional<StatsTable> stats;              ///< set iff the job is done
    std::string error;                            ///< set iff the job failed
    std::filesystem::path out;
};

/// Building ids touched by the selected blocks of a scene.
std::set<std::string> job_buildings(const JobSpec& spec);

/// Runs detail jobs on worker threads. A job only starts when none of its
/// buildings is held by a running job or by a label edit.
class JobQueue {
public:
    using Runner = std::function<StatsTable(const std::string& job_id, const JobSpec& spec,
                                            const std::filesystem::path& out, const ProgressFn& progress)>;

    JobQueue(Runner runner, std::filesystem::path root, int workers = 1);
    ~JobQueue();
    JobQueue(const JobQueue&) = delete;
    JobQueue& operator=(const JobQueue&) = delete;

    std::string submit(JobSpec spec);
    std::optional<JobStatus> status(const std::string& id) const;
    std::vector<std::string> ids() const;
    /// Blocks until the job has finished (done or failed).
    JobStatus wait(const std::string& id);

    /// Claims a building for an edit. Returns false while a running job holds
    /// it; waits while another edit holds it.
    bool acquire_for_edit(const std::string& building);
    void release_edit(const std::string& building);
    /// Highest number of concurrently running jobs that shared a building (0 by construction).
    int max_shared_running() const;

private:
    struct Job {
        JobStatus status;
        JobSpec spec;
        std::set<std::string> buildings;
    };

    void worker_loop();
    Job* next_runnable();

    Runner runner_;
    std::filesystem::path root_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::map<std::string, Job> jobs_;
    std::vector<std::string> order_;
    std::map<std::string, int> running_buildings_;
    std::set<std::string> edited_buildings_;
    std::uint64_t next_id_ = 1;
    int max_shared_ = 0;
    bool stop_ = false;
    std::vector<std::thread> workers_;
};

} // namespace mdetail::service
