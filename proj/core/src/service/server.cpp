#include "mdetail/service/server.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <limits>
#include <regex>
#include <thread>

#include "../common/json_io.hpp"
#include "httplib.h"

namespace mdetail::service {

namespace fs = std::filesystem;
using nlohmann::json;

struct Service::Http {
    httplib::Server server;
    std::thread thread;
};

namespace {

Response json_response(int status, const json& body) { return {status, body.dump(2), "application/json"}; }

Response error_response(int status, const std::string& message, const std::string& path = {}) {
    json body{{"error", message}};
    if (!path.empty()) body["path"] = path;
    return json_response(status, body);
}

/// Maps library errors onto HTTP statuses.
template <typename F>
Response guarded(F&& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        return error_response(400, e.what(), e.path());
    } catch (const ValidationError& e) {
        return error_response(400, e.what(), e.path());
    } catch (const json::exception& e) {
        return error_response(400, e.what());
    } catch (const chains::MissingCheckpointError& e) {
        return error_response(503, e.what());
    } catch (const std::exception& e) {
        return error_response(500, e.what());
    }
}

json parse_body(const std::string& body) {
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw ParseError("$", e.what());
    }
}

std::string png_base64(const Image& image, bool mask = false) { return base64_encode(encode_png(image, mask)); }

long long query_int(const Query& query, const std::string& key, long long fallback, long long lo, long long hi) {
    const auto it = query.find(key);
    if (it == query.end()) return fallback;
    long long v = 0;
    try {
        std::size_t used = 0;
        v = std::stoll(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
        throw ValidationError(key, "expected an integer");
    }
    if (v < lo || v > hi)
        throw ValidationError(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
}

std::string content_type_for(const fs::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".png") return "image/png";
    if (ext == ".json") return "application/json";
    return "text/plain";
}

json job_json(const JobStatus& s) {
    json j{{"id", s.id},
           {"state", std::string(job_state_name(s.state))},
           {"blocks", s.blocks},
           {"distribution", s.distribution},
           {"progress", s.progress}};
    if (s.stats) j["stats"] = json::parse(s.stats->to_json());
    if (s.state == JobState::failed) j["error"] = s.error;
    return j;
}

} // namespace

Service::Service(std::shared_ptr<chains::NetworkSet> nets, ServiceConfig config)
    : nets_(std::move(nets)), config_(std::move(config)) {
    if (!nets_) throw Error("Service: no networks");
    auto runner = [this](const std::string&, const JobSpec& spec, const fs::path& out, const ProgressFn& progress) {
        style::StyleDistribution dist;
        {
            std::shared_lock lock(dist_mutex_);
            dist = distributions_.at(spec.distribution);
        }
        std::map<std::string, BuildingState> states;
        StatsTable stats = detail_scene(spec.scene, spec.blocks, dist, *nets_, out, config_.options, progress, &states);
        std::lock_guard lock(state_mutex_);
        for (auto& [id, state] : states) buildings_.insert_or_assign(id, std::move(state));
        return stats;
    };
    jobs_ = std::make_unique<JobQueue>(runner, config_.out_dir, config_.workers);
}

Service::~Service() {
    stop();
    jobs_.reset();
}

Response Service::post_distribution(const std::string& body) {
    return guarded([&] {
        style::StyleDistribution dist = style::parse_distribution(body);
        style::resolve_exemplars(dist, [&](style::Property p, const std::string& exemplar) {
            return encode_exemplar_source(p, exemplar, *nets_, config_.options.exemplar_dir);
        });
        std::unique_lock lock(dist_mutex_);
        const std::string id = "dist-" + std::to_string(next_distribution_++);
        distributions_.emplace(id, std::move(dist));
        return json_response(201, {{"id", id}});
    });
}

Response Service::get_distribution(const std::string& id) const {
    return guarded([&] {
        std::shared_lock lock(dist_mutex_);
        const auto it = distributions_.find(id);
        if (it == distributions_.end()) return error_response(404, "unknown distribution " + id);
        return Response{200, style::distribution_to_json(it->second), "application/json"};
    });
}

Response Service::get_samples(const std::string& id, const Query& query) {
    return guarded([&] {
        style::StyleDistribution dist;
        {
            std::shared_lock lock(dist_mutex_);
            const auto it = distributions_.find(id);
            if (it == distributions_.end()) return error_response(404, "unknown distribution " + id);
            dist = it->second;
        }
        const auto pit = query.find("property");
        if (pit == query.end()) throw ValidationError("property", "missing query parameter");
        const auto property = style::property_from_name(pit->second);
        if (!property) throw ValidationError("property", "unknown property " + pit->second);
        const int n = int(query_int(query, "n", 4, 1, 64));
        const auto seed = std::uint64_t(query_int(query, "seed", 0, 0, std::numeric_limits<long long>::max()));

        const Preview preview = preview_samples(dist, *property, n, seed, *nets_);
        json inputs;
        inputs["content"] = png_base64(preview.content.channels() == 3 ? preview.content : preview.content.channel(0));
        inputs["mask"] = png_base64(preview.mask, true);
        if (preview.conditioned) {
            inputs["scale"] = png_base64(preview.conditioned->scale);
            const char* names[] = {"left", "right", "top", "bottom", "boundary"};
            for (int c = 0; c < 5; ++c) inputs["context"][names[c]] = png_base64(preview.conditioned->context.channel(c));
        }
        json samples = json::array();
        for (std::size_t i = 0; i < preview.images.size(); ++i)
            samples.push_back({{"z", preview.styles[i].values()}, {"image", png_base64(preview.images[i])}});
        return json_response(200, {{"property", std::string(style::property_name(*property))},
                                   {"task", std::string(gan::task_info(preview.task).name)},
                                   {"seed", seed},
                                   {"inputs", inputs},
                                   {"samples", samples}});
    });
}

Response Service::post_job(const std::string& body) {
    return guarded([&] {
        const json doc = parse_body(body);
        if (!doc.is_object()) throw ParseError("$", "expected an object");
        JobSpec spec;
        if (!doc.contains("scene")) throw ParseError("scene", "missing");
        if (doc["scene"].is_string())
            spec.scene = scene::load_scene(doc["scene"].get<std::string>());
        else
            spec.scene = scene::parse_scene(doc["scene"].dump());
        scene::validate_scene(spec.scene);
        if (!doc.contains("blocks") || !doc["blocks"].is_array()) throw ParseError("blocks", "expected an array");
        for (std::size_t k = 0; k < doc["blocks"].size(); ++k) {
            const auto& b = doc["blocks"][k];
            const std::string path = "blocks[" + std::to_string(k) + "]";
            if (!b.is_number_integer() || b.get<long long>() < 0) throw ParseError(path, "expected a block index");
            if (b.get<std::size_t>() >= spec.scene.blocks.size()) throw ValidationError(path, "no such block");
            spec.blocks.push_back(b.get<std::size_t>());
        }
        if (!doc.contains("distribution") || !doc["distribution"].is_string())
            throw ParseError("distribution", "expected a distribution id");
        spec.distribution = doc["distribution"].get<std::string>();
        {
            std::shared_lock lock(dist_mutex_);
            if (!distributions_.count(spec.distribution))
                return error_response(404, "unknown distribution " + spec.distribution, "distribution");
        }
        const std::string id = jobs_->submit(std::move(spec));
        return json_response(202, {{"id", id}, {"state", "queued"}});
    });
}

Response Service::get_job(const std::string& id) const {
    const auto s = jobs_->status(id);
    if (!s) return error_response(404, "unknown job " + id);
    return json_response(200, job_json(*s));
}

Response Service::get_job_outputs(const std::string& id) const {
    return guarded([&] {
        const auto s = jobs_->status(id);
        if (!s) return error_response(404, "unknown job " + id);
        std::vector<std::string> files;
        std::error_code ec;
        if (fs::is_directory(s->out, ec))
            for (const auto& e : fs::recursive_directory_iterator(s->out))
                if (e.is_regular_file()) files.push_back(fs::relative(e.path(), s->out).generic_string());
        std::sort(files.begin(), files.end());
        return json_response(200, {{"id", id}, {"state", std::string(job_state_name(s->state))}, {"files", files}});
    });
}

Response Service::get_job_file(const std::string& id, const std::string& relative) const {
    return guarded([&] {
        const auto s = jobs_->status(id);
        if (!s) return error_response(404, "unknown job " + id);
        const fs::path rel(relative);
        if (rel.is_absolute() || std::any_of(rel.begin(), rel.end(), [](const fs::path& p) { return p == ".."; }))
            return error_response(400, "invalid file path", "path");
        const fs::path file = s->out / rel;
        std::ifstream in(file, std::ios::binary);
        if (!fs::is_regular_file(file) || !in) return error_response(404, "no output " + relative);
        return Response{200, std::string(std::istreambuf_iterator<char>(in), {}), content_type_for(file)};
    });
}

Response Service::put_labels(const std::string& building, const std::string& body) {
    return guarded([&] {
        const json doc = parse_body(body);
        if (!doc.is_object() || !doc.contains("facade") || !doc["facade"].is_number_integer() ||
            doc["facade"].get<long long>() < 0)
            throw ParseError("facade", "expected a facade index");
        auto boxes = [&](const char* key) {
            std::vector<regularize::DetailBox> out;
            if (!doc.contains(key)) return out;
            if (!doc[key].is_array()) throw ParseError(key, "expected an array of boxes");
            for (std::size_t i = 0; i < doc[key].size(); ++i)
                out.push_back(box_from_json(doc[key][i], std::string(key) + "[" + std::to_string(i) + "]"));
            return out;
        };
        const auto windows = boxes("windows");
        const auto details = boxes("details");

        BuildingState* state = nullptr;
        {
            std::lock_guard lock(state_mutex_);
            const auto it = buildings_.find(building);
            if (it == buildings_.end()) return error_response(404, "unknown or undetailed building " + building);
            state = &it->second;
        }
        if (!jobs_->acquire_for_edit(building))
            return error_response(409, "building " + building + " is being detailed by a running job");
        try {
            const auto stages = apply_label_edit(*state, doc["facade"].get<std::size_t>(), windows, details, *nets_,
                                                 config_.options);
            jobs_->release_edit(building);
            return json_response(200, {{"building", building}, {"regenerated", stages}});
        } catch (...) {
            jobs_->release_edit(building);
            throw;
        }
    });
}

Response Service::handle(const std::string& method, const std::string& path, const Query& query,
                         const std::string& body) {
    static const std::regex distribution(R"(^/distributions/([^/]+)$)");
    static const std::regex samples(R"(^/distributions/([^/]+)/samples$)");
    static const std::regex job(R"(^/jobs/([^/]+)$)");
    static const std::regex outputs(R"(^/jobs/([^/]+)/outputs$)");
    static const std::regex file(R"(^/jobs/([^/]+)/files/(.+)$)");
    static const std::regex labels(R"(^/buildings/([^/]+)/labels$)");
    std::smatch m;
    auto allow = [&](const char* expected) {
        return method == expected ? std::optional<Response>()
                                  : std::optional<Response>(error_response(405, "method not allowed"));
    };
    if (path == "/distributions") {
        if (auto r = allow("POST")) return *r;
        return post_distribution(body);
    }
    if (path == "/jobs") {
        if (auto r = allow("POST")) return *r;
        return post_job(body);
    }
    if (std::regex_match(path, m, distribution)) {
        if (auto r = allow("GET")) return *r;
        return get_distribution(m[1]);
    }
    if (std::regex_match(path, m, samples)) {
        if (auto r = allow("GET")) return *r;
        return get_samples(m[1], query);
    }
    if (std::regex_match(path, m, job)) {
        if (auto r = allow("GET")) return *r;
        return get_job(m[1]);
    }
    if (std::regex_match(path, m, outputs)) {
        if (auto r = allow("GET")) return *r;
        return get_job_outputs(m[1]);
    }
    if (std::regex_match(path, m, file)) {
        if (auto r = allow("GET")) return *r;
        return get_job_file(m[1], m[2]);
    }
    if (std::regex_match(path, m, labels)) {
        if (auto r = allow("PUT")) return *r;
        return put_labels(m[1], body);
    }
    return error_response(404, "no route for " + path);
}

namespace {

void install_routes(httplib::Server& server, Service& service) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
        Query query;
        for (const auto& [k, v] : req.params) query[k] = v;
        const Response r = service.handle(req.method, req.path, query, req.body);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
    server.Put(".*", handler);
    // routed so that unsupported methods get a 405 instead of the server's 404
    server.Delete(".*", handler);
    server.Patch(".*", handler);
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

} // namespace

int Service::start(const std::string& host, int port) {
    if (http_) throw Error("service already started");
    http_ = std::make_unique<Http>();
    install_routes(http_->server, *this);
    const int bound =
        port == 0 ? http_->server.bind_to_any_port(host) : (http_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
        http_.reset();
        throw Error("cannot bind " + host + ":" + std::to_string(port));
    }
    http_->thread = std::thread([this] { http_->server.listen_after_bind(); });
    http_->server.wait_until_ready();
    return bound;
}

void Service::run(const std::string& host, int port) {
    if (http_) throw Error("service already started");
    http_ = std::make_unique<Http>();
    install_routes(http_->server, *this);
    if (!http_->server.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

void Service::stop() {
    if (!http_) return;
    http_->server.stop();
    if (http_->thread.joinable()) http_->thread.join();
    http_.reset();
}

} // namespace mdetail::service
