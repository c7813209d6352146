#include "mdetail/gan/config.hpp"

#include <bit>

#include "json.hpp"
#include "mdetail/error.hpp"

namespace mdetail::gan {

using nlohmann::json;

TrainConfig TrainConfig::for_task(Task task) {
    const TaskInfo& info = task_info(task);
    TrainConfig c;
    c.is_label_gan = info.label_output;
    if (c.is_label_gan) c.lambda_l1 = 1.0;
    c.net.resolution = info.desk_resolution;
    c.net.in_channels = input_channels(info);
    c.net.content_channels = info.content_channels;
    c.net.style_dim = info.styled ? style::kStyleDim : 0;
    // Bottleneck at 4×4 keeps instance norm well defined.
    c.net.depth = std::max(1, int(std::bit_width(unsigned(info.desk_resolution))) - 1 - 2);
    c.net.encoder_depth = c.net.depth;
    if (!info.styled) {
        c.lambda_kl = 0.0;
        c.lambda_lr = 0.0;
    }
    return c;
}

namespace {

const char* activation_name(Activation a) { return a == Activation::silu ? "silu" : "leaky_relu"; }
const char* norm_name(Norm n) { return n == Norm::instance ? "instance" : "none"; }

} // namespace

std::string config_to_json(Task task, const TrainConfig& c) {
    json j;
    j["task"] = std::string(task_info(task).name);
    j["lambda_gan"] = c.lambda_gan;
    j["lambda_l1"] = c.lambda_l1;
    j["lambda_kl"] = c.lambda_kl;
    j["lambda_lr"] = c.lambda_lr;
    j["epochs"] = c.epochs;
    j["batch_size"] = c.batch_size;
    j["learning_rate"] = c.learning_rate;
    j["beta1"] = c.beta1;
    j["beta2"] = c.beta2;
    j["is_label_gan"] = c.is_label_gan;
    j["seed"] = c.seed;
    j["deterministic"] = c.deterministic;
    j["divergence_bound"] = c.divergence_bound;
    j["lr_updates_encoder"] = c.lr_updates_encoder;
    j["net"] = {{"resolution", c.net.resolution}, {"in_channels", c.net.in_channels},
                {"content_channels", c.net.content_channels}, {"style_dim", c.net.style_dim},
                {"ngf", c.net.ngf}, {"nef", c.net.nef}, {"ndf", c.net.ndf}, {"depth", c.net.depth},
                {"encoder_depth", c.net.encoder_depth}, {"disc_layers", c.net.disc_layers},
                {"activation", activation_name(c.net.activation)}, {"norm", norm_name(c.net.norm)}};
    return j.dump(2);
}

TrainConfig config_from_json(const std::string& text, const TrainConfig& base) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("$", e.what());
    }
    if (!j.is_object()) throw ParseError("$", "expected an object");
    TrainConfig c = base;
    auto num = [&](const json& o, const char* key, auto& field, const std::string& prefix) {
        if (!o.contains(key)) return;
        if (!o[key].is_number() && !o[key].is_boolean()) throw ParseError(prefix + key, "expected a number");
        field = o[key].get<std::decay_t<decltype(field)>>();
    };
    num(j, "lambda_gan", c.lambda_gan, "");
    num(j, "lambda_l1", c.lambda_l1, "");
    num(j, "lambda_kl", c.lambda_kl, "");
    num(j, "lambda_lr", c.lambda_lr, "");
    num(j, "epochs", c.epochs, "");
    num(j, "batch_size", c.batch_size, "");
    num(j, "learning_rate", c.learning_rate, "");
    num(j, "beta1", c.beta1, "");
    num(j, "beta2", c.beta2, "");
    num(j, "is_label_gan", c.is_label_gan, "");
    num(j, "seed", c.seed, "");
    num(j, "deterministic", c.deterministic, "");
    num(j, "divergence_bound", c.divergence_bound, "");
    num(j, "lr_updates_encoder", c.lr_updates_encoder, "");
    if (j.contains("net")) {
        const json& n = j["net"];
        if (!n.is_object()) throw ParseError("net", "expected an object");
        num(n, "resolution", c.net.resolution, "net.");
        num(n, "in_channels", c.net.in_channels, "net.");
        num(n, "content_channels", c.net.content_channels, "net.");
        num(n, "style_dim", c.net.style_dim, "net.");
        num(n, "ngf", c.net.ngf, "net.");
        num(n, "nef", c.net.nef, "net.");
        num(n, "ndf", c.net.ndf, "net.");
        num(n, "depth", c.net.depth, "net.");
        num(n, "encoder_depth", c.net.encoder_depth, "net.");
        num(n, "disc_layers", c.net.disc_layers, "net.");
        if (n.contains("activation")) c.net.activation = n["activation"] == "silu" ? Activation::silu : Activation::leaky_relu;
        if (n.contains("norm")) c.net.norm = n["norm"] == "none" ? Norm::none : Norm::instance;
    }
    if (c.epochs < 0) throw ParseError("epochs", "must be >= 0");
    if (c.batch_size <= 0) throw ParseError("batch_size", "must be positive");
    if (c.net.resolution % (1 << c.net.depth) != 0) throw ParseError("net.depth", "resolution not divisible by 2^depth");
    return c;
}

Task task_from_config_json(const std::string& text) {
    const json j = json::parse(text);
    const auto t = task_from_name(j.at("task").get<std::string>());
    if (!t) throw ParseError("task", "unknown task");
    return *t;
}

} // namespace mdetail::gan
