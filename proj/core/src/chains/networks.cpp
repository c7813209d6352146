#include <algorithm>

#include "mdetail/chains/chains.hpp"
#include "mdetail/gan/model.hpp"

namespace mdetail::chains {

GanNetwork::GanNetwork(std::shared_ptr<const gan::GanModel> model) : model_(std::move(model)) {
    if (!model_) throw Error("GanNetwork: null model");
}

int GanNetwork::resolution() const { return model_->resolution(); }

Image GanNetwork::translate(const Image& input, const style::StyleVector& z) const {
    return model_->generate(input, z);
}

const style::StyleEncoder* GanNetwork::encoder() const { return model_->styled() ? model_.get() : nullptr; }

MissingCheckpointError::MissingCheckpointError(gan::Task task, const std::filesystem::path& path)
    : Error("missing checkpoint for task " + std::string(gan::task_info(task).name) + ": " + path.string()),
      task_(task) {}

CheckpointNetworks::CheckpointNetworks(std::filesystem::path dir, int max_resident)
    : dir_(std::move(dir)), max_resident_(std::max(0, max_resident)) {}

std::filesystem::path CheckpointNetworks::checkpoint_path(const std::filesystem::path& dir, gan::Task task) {
    return dir / (std::string(gan::task_info(task).name) + ".ckpt");
}

std::shared_ptr<const Network> CheckpointNetworks::get(gan::Task task) {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(task); it != cache_.end()) {
        lru_.remove(task);
        lru_.push_front(task);
        return it->second;
    }
    const auto path = checkpoint_path(dir_, task);
    if (!std::filesystem::exists(path)) throw MissingCheckpointError(task, path);
    auto model = std::make_shared<const gan::GanModel>(gan::GanModel::load(path));
    if (model->task() != task)
        throw Error("checkpoint " + path.string() + " holds task " + std::string(model->info().name));
    auto net = std::make_shared<const GanNetwork>(std::move(model));
    ++loads_;
    // Evicted networks stay alive while a chain still holds them.
    if (max_resident_ > 0)
        while (int(cache_.size()) >= max_resident_) {
            cache_.erase(lru_.back());
            lru_.pop_back();
        }
    cache_[task] = net;
    lru_.push_front(task);
    return net;
}

void CheckpointNetworks::require_all() const {
    for (const auto& info : gan::all_tasks()) {
        const auto path = checkpoint_path(dir_, info.task);
        if (!std::filesystem::exists(path)) throw MissingCheckpointError(info.task, path);
    }
}

int CheckpointNetworks::resident() const {
    std::lock_guard lock(mutex_);
    return int(cache_.size());
}

int CheckpointNetworks::loads() const {
    std::lock_guard lock(mutex_);
    return loads_;
}

void FixedNetworks::set(gan::Task task, std::shared_ptr<const Network> net) { nets_[task] = std::move(net); }

std::shared_ptr<const Network> FixedNetworks::get(gan::Task task) {
    auto it = nets_.find(task);
    if (it == nets_.end()) throw MissingCheckpointError(task, "<in-memory>");
    return it->second;
}

} // namespace mdetail::chains
