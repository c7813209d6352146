#include "mdetail/service/jobs.hpp"

#include <algorithm>

namespace mdetail::service {

std::string_view job_state_name(JobState state) {
    switch (state) {
    case JobState::queued: return "queued";
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::failed: return "failed";
    }
    return "unknown";
}

std::set<std::string> job_buildings(const JobSpec& spec) {
    std::set<std::string> out;
    for (std::size_t b : spec.blocks)
        if (b < spec.scene.blocks.size()) out.insert(spec.scene.blocks[b].begin(), spec.scene.blocks[b].end());
    return out;
}

JobQueue::JobQueue(Runner runner, std::filesystem::path root, int workers)
    : runner_(std::move(runner)), root_(std::move(root)) {
    for (int i = 0; i < std::max(1, workers); ++i) workers_.emplace_back([this] { worker_loop(); });
}

JobQueue::~JobQueue() {
    {
        std::lock_guard lock(mutex_);
        stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : workers_) t.join();
}

std::string JobQueue::submit(JobSpec spec) {
    std::string id;
    {
        std::lock_guard lock(mutex_);
        id = "job-" + std::to_string(next_id_++);
        Job job;
        job.buildings = job_buildings(spec);
        job.status.id = id;
        job.status.blocks = spec.blocks;
        job.status.distribution = spec.distribution;
        job.status.out = root_ / id;
        for (const auto& b : job.buildings) job.status.progress[b] = "queued";
        job.spec = std::move(spec);
        jobs_.emplace(id, std::move(job));
        order_.push_back(id);
    }
    cv_.notify_all();
    return id;
}

std::optional<JobStatus> JobQueue::status(const std::string& id) const {
    std::lock_guard lock(mutex_);
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) return std::nullopt;
    return it->second.status;
}

std::vector<std::string> JobQueue::ids() const {
    std::lock_guard lock(mutex_);
    return order_;
}

JobStatus JobQueue::wait(const std::string& id) {
    std::unique_lock lock(mutex_);
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) throw Error("unknown job " + id);
    cv_.wait(lock, [&] {
        const auto s = it->second.status.state;
        return s == JobState::done || s == JobState::failed;
    });
    return it->second.status;
}

bool JobQueue::acquire_for_edit(const std::string& building) {
    std::unique_lock lock(mutex_);
    if (running_buildings_.count(building)) return false;
    cv_.wait(lock, [&] { return !edited_buildings_.count(building) || running_buildings_.count(building); });
    if (running_buildings_.count(building)) return false;
    edited_buildings_.insert(building);
    return true;
}

void JobQueue::release_edit(const std::string& building) {
    {
        std::lock_guard lock(mutex_);
        edited_buildings_.erase(building);
    }
    cv_.notify_all();
}

int JobQueue::max_shared_running() const {
    std::lock_guard lock(mutex_);
    return max_shared_;
}

JobQueue::Job* JobQueue::next_runnable() {
    for (const auto& id : order_) {
        Job& job = jobs_.at(id);
        if (job.status.state != JobState::queued) continue;
        const bool free = std::none_of(job.buildings.begin(), job.buildings.end(), [&](const std::string& b) {
            return running_buildings_.count(b) || edited_buildings_.count(b);
        });
        if (free) return &job;
    }
    return nullptr;
}

void JobQueue::worker_loop() {
    std::unique_lock lock(mutex_);
    for (;;) {
        Job* job = nullptr;
        cv_.wait(lock, [&] { return stop_ || (job = next_runnable()) != nullptr; });
        if (stop_) return;
        job->status.state = JobState::running;
        for (const auto& b : job->buildings) max_shared_ = std::max(max_shared_, running_buildings_[b]++);
        const std::string id = job->status.id;
        const JobSpec spec = job->spec;
        const auto out = job->status.out;
        lock.unlock();

        ProgressFn progress = [this, id](const std::string& building, const std::string& stage) {
            std::lock_guard guard(mutex_);
            jobs_.at(id).status.progress[building] = stage;
        };
        std::optional<StatsTable> stats;
        std::string error;
        try {
            stats = runner_(id, spec, out, progress);
        } catch (const std::exception& e) {
            error = e.what();
        }

        lock.lock();
        Job& done = jobs_.at(id);
        for (const auto& b : done.buildings) {
            if (--running_buildings_[b] == 0) running_buildings_.erase(b);
            if (stats) done.status.progress[b] = "done";
        }
        if (stats) {
            done.status.stats = std::move(stats);
            done.status.state = JobState::done;
        } else {
            done.status.error = error.empty() ? "unknown error" : error;
            done.status.state = JobState::failed;
        }
        cv_.notify_all();
    }
}

} // namespace mdetail::service
