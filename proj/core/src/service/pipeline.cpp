#include "mdetail/service/pipeline.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "../common/json_io.hpp"
#include "mdetail/gan/model.hpp"
#include "mdetail/gan/tasks.hpp"
#include "mdetail/synth/synth.hpp"

namespace mdetail::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = kFnvOffset) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

LabelGrid upsample_labels(const LabelGrid& grid, int factor) {
    LabelGrid out(grid.width * factor, grid.height * factor, Label::background);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) out.at(x, y) = grid.at(x / factor, y / factor);
    return out;
}

Image to_rgb(const Image& img) {
    if (img.channels() == 3) return img;
    Image out(img.width(), img.height(), 3);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x, y, img.channels() >= 3 ? c : 0);
    return out;
}

geometry::Surface textured_surface(std::string name, geometry::DetailMesh mesh, Image texture, const LabelGrid& labels,
                                   const geometry::DetailProfile& profile) {
    geometry::Surface s;
    s.name = std::move(name);
    s.mesh = std::move(mesh);
    s.normals = geometry::generate_normal_map(texture, labels, geometry::roughness_weights(), profile.height_amplitude);
    s.materials = geometry::assign_materials(labels);
    s.texture = std::move(texture);
    return s;
}

std::string facade_dir(std::size_t i) { return "facade-" + std::to_string(i); }

} // namespace

BlockStats StatsTable::totals() const {
    BlockStats t;
    t.block = "total";
    for (const auto& r : rows) {
        t.roofs += r.roofs;
        t.facades += r.facades;
        t.windows += r.windows;
        t.seconds += r.seconds;
    }
    return t;
}

std::string StatsTable::to_text() const {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %8s %8s %8s %10s\n", "block", "roofs", "facades", "windows", "time(s)");
    os << line;
    auto row = [&](const BlockStats& r) {
        std::snprintf(line, sizeof line, "%-16s %8d %8d %8d %10.2f\n", r.block.c_str(), r.roofs, r.facades, r.windows,
                      r.seconds);
        os << line;
    };
    for (const auto& r : rows) row(r);
    row(totals());
    return os.str();
}

std::string StatsTable::to_json() const {
    auto row = [](const BlockStats& r) {
        return json{{"block", r.block}, {"roofs", r.roofs}, {"facades", r.facades}, {"windows", r.windows},
                    {"seconds", r.seconds}};
    };
    json blocks = json::array();
    for (const auto& r : rows) blocks.push_back(row(r));
    return json{{"blocks", blocks}, {"totals", row(totals())}}.dump(2);
}

StatsTable StatsTable::from_json(const std::string& text) {
    StatsTable t;
    try {
        const json doc = json::parse(text);
        for (const auto& b : doc.at("blocks"))
            t.rows.push_back({b.at("block").get<std::string>(), b.at("roofs").get<int>(), b.at("facades").get<int>(),
                              b.at("windows").get<int>(), b.at("seconds").get<double>()});
    } catch (const json::exception& e) {
        throw ParseError("stats", e.what());
    }
    return t;
}

style::BuildingStyle building_style(const style::StyleDistribution& dist, std::uint64_t seed, const std::string& id) {
    const std::uint64_t h = fnv1a(id);
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(h), std::uint32_t(h >> 32)};
    style::Rng rng(seq);
    return style::sample_building_styles(dist.sets, rng);
}

BuildingState detail_building(const scene::Building& building, const style::BuildingStyle& style,
                              chains::NetworkSet& nets, const fs::path& dir, const DetailOptions& options,
                              const ProgressFn& progress) {
    auto report = [&](const std::string& stage) {
        if (progress) progress(building.id, stage);
    };
    BuildingState state{building, style, {}, std::nullopt, dir};
    fs::create_directories(dir);
    const bool has_roof = !building.roof.faces.empty();
    for (std::size_t i = 0; i < building.facades.size(); ++i) {
        report(facade_dir(i));
        const auto projection =
            has_roof ? chains::project_roof_onto_facade(building, i) : std::vector<Polygon2>{};
        auto fr = chains::run_facade_chain(building.facades[i], projection, style, nets, options.chain);
        chains::run_window_chains(fr, style, nets, options.chain);
        chains::write_facade_result(dir / facade_dir(i), fr, style);
        state.facades.push_back(std::move(fr));
    }
    if (has_roof) {
        report("roof");
        const auto frame = scene::roof_frame(building.roof, nets.get(gan::Task::roof_labels)->resolution());
        std::vector<Rect> dormers;
        for (std::size_t i = 0; i < building.facades.size(); ++i) {
            const auto d = chains::dormer_footprints(building, i, state.facades[i], frame);
            dormers.insert(dormers.end(), d.begin(), d.end());
        }
        state.roof = chains::run_roof_chain(building.roof, dormers, style, nets, options.chain);
        chains::write_roof_result(dir / "roof", *state.roof);
    }
    report("geometry");
    write_building_outputs(state, options);
    return state;
}

void write_building_outputs(const BuildingState& state, const DetailOptions& options) {
    const auto& building = state.building;
    std::vector<geometry::Surface> surfaces;
    json warnings = json::object();
    for (std::size_t i = 0; i < state.facades.size(); ++i) {
        const auto& fr = state.facades[i];
        const double hires_ppm = 2.0 * fr.frame.pixels_per_meter;
        auto merged = geometry::merge_window_maps(fr.hires, upsample_labels(fr.labels, 2), hires_ppm,
                                                  fr.window_results, fr.windows, options.profile.feather_px);
        std::vector<regularize::DetailBox> boxes = fr.windows;
        boxes.insert(boxes.end(), fr.details.begin(), fr.details.end());
        const Polygon2 outline = scene::project_polygon(building.facades[i].polygon, fr.frame);
        auto mesh = geometry::synthesize_facade_geometry(boxes, fr.frame, outline, building.roof.faces, options.profile);
        if (!merged.warnings.empty()) warnings["facade" + std::to_string(i)] = merged.warnings;
        surfaces.push_back(textured_surface("facade" + std::to_string(i), std::move(mesh), std::move(merged.texture),
                                            merged.labels, options.profile));
    }
    if (state.roof) {
        const auto& rr = *state.roof;
        auto mesh = geometry::synthesize_roof_geometry(rr.features, building.roof, rr.frame, options.profile);
        surfaces.push_back(
            textured_surface("roof", std::move(mesh), rr.hires, upsample_labels(rr.labels, 2), options.profile));
    }
    geometry::write_building(state.dir, surfaces);
    std::ofstream(state.dir / "merge_warnings.json") << warnings.dump(2) << '\n';
}

std::vector<std::string> apply_label_edit(BuildingState& state, std::size_t facade_index,
                                          const std::vector<regularize::DetailBox>& windows,
                                          const std::vector<regularize::DetailBox>& details, chains::NetworkSet& nets,
                                          const DetailOptions& options) {
    if (facade_index >= state.facades.size())
        throw ValidationError("facade", "building " + state.building.id + " has no facade " +
                                            std::to_string(facade_index));
    auto& fr = state.facades[facade_index];
    chains::apply_facade_boxes(fr, windows, details, state.style, nets, options.chain);
    const fs::path dir = state.dir / facade_dir(facade_index);
    fs::remove_all(dir);
    chains::write_facade_result(dir, fr, state.style);
    write_building_outputs(state, options);
    return {"texture", "merge", "geometry"};
}

StatsTable detail_scene(const scene::MassModelScene& scene, const std::vector<std::size_t>& blocks,
                        const style::StyleDistribution& dist, chains::NetworkSet& nets, const fs::path& out,
                        const DetailOptions& options, const ProgressFn& progress,
                        std::map<std::string, BuildingState>* states) {
    for (std::size_t k = 0; k < blocks.size(); ++k)
        if (blocks[k] >= scene.blocks.size())
            throw ValidationError("blocks[" + std::to_string(k) + "]", "no block " + std::to_string(blocks[k]));
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto& ids = scene.blocks[blocks[k]];
        for (std::size_t j = 0; j < ids.size(); ++j)
            if (!scene.find(ids[j]))
                throw ValidationError("blocks[" + std::to_string(blocks[k]) + "][" + std::to_string(j) + "]",
                                      "unknown building " + ids[j]);
    }

    style::StyleDistribution resolved = dist;
    style::resolve_exemplars(resolved, [&](style::Property p, const std::string& exemplar) {
        return encode_exemplar_source(p, exemplar, nets, options.exemplar_dir);
    });

    fs::create_directories(out);
    StatsTable table;
    for (std::size_t b : blocks) {
        BlockStats row;
        row.block = "block-" + std::to_string(b);
        const auto t0 = std::chrono::steady_clock::now();
        for (const auto& id : scene.blocks[b]) {
            const scene::Building& building = *scene.find(id);
            const auto style = building_style(resolved, options.seed, id);
            BuildingState state = detail_building(building, style, nets, out / id, options, progress);
            row.facades += int(state.facades.size());
            if (state.roof) ++row.roofs;
            for (const auto& f : state.facades)
                row.windows += int(std::count_if(f.windows.begin(), f.windows.end(),
                                                 [](const auto& w) { return w.label == Label::window; }));
            if (states) states->insert_or_assign(id, std::move(state));
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        table.rows.push_back(row);
    }
    std::ofstream(out / "stats.json") << table.to_json() << '\n';
    return table;
}

std::map<std::string, std::string> output_checksums(const fs::path& dir) {
    std::map<std::string, std::string> sums;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name == "timings.json" || name == "stats.json") continue;
        sums[fs::relative(entry.path(), dir).generic_string()] = hex64(fnv1a(read_file(entry.path())));
    }
    return sums;
}

std::string combined_checksum(const fs::path& dir) {
    std::uint64_t h = kFnvOffset;
    for (const auto& [path, sum] : output_checksums(dir)) {
        h = fnv1a(path, h);
        h = fnv1a(sum, h);
    }
    return hex64(h);
}

gan::Task task_for_property(style::Property property) {
    for (const auto& info : gan::all_tasks())
        if (info.property == property) return info.task;
    throw ValidationError("property", "no network serves " + std::string(style::property_name(property)));
}

Preview preview_samples(const style::StyleDistribution& dist, style::Property property, int n, std::uint64_t seed,
                        chains::NetworkSet& nets) {
    if (n < 1) throw ValidationError("n", "at least one sample is required");
    Preview p;
    p.task = task_for_property(property);
    const auto& info = gan::task_info(p.task);
    const auto net = nets.get(p.task);
    synth::DatasetSpec spec;
    spec.task = p.task;
    spec.count = 1;
    spec.resolution = net->resolution();
    spec.seed = seed;
    const synth::Sample sample = synth::generate_sample(spec, 0);
    const gan::TrainPair pair = synth::to_train_pair(p.task, sample);
    p.content = pair.content;
    p.mask = gan::foreground_mask(sample.extra ? *sample.extra : sample.a);
    if (info.conditioned) p.conditioned = gan::build_conditioned_input(pair.content, p.mask, sample.pixels_per_meter);
    for (int i = 0; i < n; ++i) {
        const auto style = building_style(dist, seed, "sample-" + std::to_string(i));
        Image out = net->translate(pair.input, style[property]);
        if (info.label_output) out = render_labels(quantize(out, info.output_labels));
        p.styles.push_back(style[property]);
        p.images.push_back(std::move(out));
    }
    return p;
}

style::StyleVector encode_exemplar_source(style::Property property, const std::string& exemplar,
                                          chains::NetworkSet& nets, const fs::path& base_dir) {
    Image image;
    std::error_code ec;
    const fs::path path = base_dir / exemplar;
    if (exemplar.size() < 1024 && fs::is_regular_file(path, ec)) {
        image = read_png(path);
    } else {
        std::string payload = exemplar;
        if (payload.rfind("data:", 0) == 0) {
            const auto comma = payload.find(',');
            payload = comma == std::string::npos ? std::string() : payload.substr(comma + 1);
        }
        const auto bytes = base64_decode(payload);
        if (bytes.empty())
            throw ValidationError("exemplar", "neither a readable PNG file nor a base64-encoded PNG");
        image = decode_png(bytes);
    }
    for (const auto& info : gan::all_tasks()) {
        if (info.property != property) continue;
        const auto net = nets.get(info.task);
        if (const auto* enc = net->encoder()) return style::encode_exemplar(to_rgb(image), *enc);
    }
    throw Error("no style encoder serves property " + std::string(style::property_name(property)));
}

std::string base64_encode(std::span<const unsigned char> bytes) {
    static constexpr char kTable[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < bytes.size(); i += 3) {
        const std::uint32_t b0 = bytes[i];
        const std::uint32_t b1 = i + 1 < bytes.size() ? bytes[i + 1] : 0;
        const std::uint32_t b2 = i + 2 < bytes.size() ? bytes[i + 2] : 0;
        const std::uint32_t v = (b0 << 16) | (b1 << 8) | b2;
        out += kTable[(v >> 18) & 63];
        out += kTable[(v >> 12) & 63];
        out += i + 1 < bytes.size() ? kTable[(v >> 6) & 63] : '=';
        out += i + 2 < bytes.size() ? kTable[v & 63] : '=';
    }
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::vector<unsigned char> out;
    std::uint32_t acc = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=') break;
        if (c == '\n' || c == '\r' || c == ' ') continue;
        const int v = value(c);
        if (v < 0) throw ParseError("base64", "invalid character");
        acc = (acc << 6) | std::uint32_t(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<unsigned char>((acc >> bits) & 0xff));
        }
    }
    return out;
}

} // namespace mdetail::service
