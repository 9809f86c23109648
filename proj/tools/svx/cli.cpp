#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "svx/bench.hpp"
#include "svx/errors.hpp"
#include "svx/features.hpp"
#include "svx/image_io.hpp"
#include "svx/metrics.hpp"
#include "svx/phantom.hpp"
#include "svx/rag.hpp"
#include "svx/refine.hpp"
#include "svx/schedule.hpp"
#include "svx/supervoxel.hpp"

namespace svx::cli {

using nlohmann::json;
namespace fs = std::filesystem;

void run_bench_command(const BenchParams& p, const std::string& out_dir, bool overlays, bool as_json);

namespace {

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string num(double v, int precision = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::ofstream open_out(const fs::path& p) {
    ensure_parent(p);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open " + p.string() + " for writing");
    return out;
}

template <class Image>
void save(const Image& img, const fs::path& p) {
    ensure_parent(p);
    write_image(img, p);
}

json dims_json(const Dims& d) { return json::array({d.nx, d.ny, d.nz}); }

std::optional<double> parse_tau(const std::string& text) {
    if (text == "auto") return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        if (!(v > 0.0) || !std::isfinite(v)) throw ParamError("--tau must be positive or 'auto'");
        return v;
    } catch (const ParamError&) {
        throw;
    } catch (const std::exception&) {
        throw ParamError("--tau must be a number or 'auto', got '" + text + "'");
    }
}

LabelMap binary(LabelMap m) {
    for (auto& l : m.labels()) l = l != 0;
    return m;
}

// SLIC flags shared by slic, refine and bench.
struct SlicFlags {
    int n_segments = 350;
    double compactness = 0.01;
    double sigma = 1.0;
    int max_iter = 10;
    void add(CLI::App* c) {
        c->add_option("--n-segments", n_segments, "requested supervoxel count")->capture_default_str();
        c->add_option("--compactness", compactness, "spatial weight m")->capture_default_str();
        c->add_option("--sigma", sigma, "Gaussian pre-smoothing, voxels")->capture_default_str();
        c->add_option("--max-iter", max_iter, "assignment/update rounds")->capture_default_str();
    }
    void apply(SlicParams& p) const {
        p.n_segments = n_segments;
        p.compactness = compactness;
        p.sigma = sigma;
        p.max_iter = max_iter;
    }
};

struct RefineFlags {
    double sim0 = 0.1;
    int nc = 30;
    double lambda = 0.5;
    std::string tau = "auto";
    double fit_threshold = 0.5;
    void add(CLI::App* c) {
        c->add_option("--sim0", sim0, "stopping similarity")->capture_default_str();
        c->add_option("--nc", nc, "candidates examined per pass")->capture_default_str();
        c->add_option("--lambda", lambda, "weight of the content term")->capture_default_str();
        c->add_option("--tau", tau, "content distance scale or 'auto'")->capture_default_str();
        c->add_option("--fit-threshold", fit_threshold, "seed overlap a supervoxel must exceed")->capture_default_str();
    }
    void apply(RefineParams& p) const {
        p.similarity.sim0 = sim0;
        p.similarity.lambda = lambda;
        p.similarity.tau = parse_tau(tau);
        p.n_c = nc;
        p.fit_threshold = fit_threshold;
    }
};

// ---------------------------------------------------------------------------

struct SlicCmd {
    std::string input, output, channels = "0";
    SlicFlags slic;
    bool json_out = false;
    void add(CLI::App& app, std::function<void()>& action) {
        auto* c = app.add_subcommand("slic", "build a supervoxel map");
        c->add_option("--input", input, "volume header (.mhd)")->required();
        c->add_option("--channels", channels, "comma-separated channels clustered jointly")->capture_default_str();
        slic.add(c);
        c->add_option("--output", output, "supervoxel map header to write")->required();
        c->add_flag("--json", json_out, "print a JSON result");
        c->callback([this, &action] { action = [this] { run(); }; });
    }
    void run() const {
        const auto v = read_volume(input);
        SlicParams p;
        slic.apply(p);
        p.channels = parse_int_list(channels, "--channels");
        const auto sp = svx::slic(v, p);
        save(sp, output);
        if (json_out) {
            emit({{"command", "slic"}, {"output", output}, {"supervoxels", sp.label_count()}, {"dims", dims_json(sp.dims())}});
        } else {
            std::cout << "wrote " << sp.label_count() << " supervoxels to " << output << "\n";
        }
    }
};

const char* kFieldNames[kFeaturesPerChannel] = {
    "mean",    "variance", "skewness", "hist0",   "hist1",   "hist2",   "hist3",    "hist4",   "hist5",
    "hist6",   "hist7",    "hist8",    "hist9",   "glcm_contrast", "glcm_energy", "glcm_entropy", "orient0", "orient1",
    "orient2", "orient3",  "orient4",  "orient5", "orient6", "orient7", "orient8",  "orient9", "mag0",
    "mag1",    "mag2",     "mag3",     "mag4",    "mag5",    "mag6",    "mag7",     "mag8",    "mag9"};

struct FeaturesCmd {
    std::string input, supervoxels, channels = "0", output;
    bool json_out = false;
    void add(CLI::App& app, std::function<void()>& action) {
        auto* c = app.add_subcommand("features", "per-supervoxel feature table as CSV");
        c->add_option("--input", input, "volume header")->required();
        c->add_option("--supervoxels", supervoxels, "supervoxel map header")->required();
        c->add_option("--channels", channels, "comma-separated feature channels")->capture_default_str();
        c->add_option("--output", output, "CSV file to write")->required();
        c->add_flag("--json", json_out, "print a JSON result");
        c->callback([this, &action] { action = [this] { run(); }; });
    }
    void run() const {
        const auto v = read_volume(input);
        const auto sp = read_labels(supervoxels);
        if (sp.dims() != v.dims()) throw DataError("volume and supervoxel map dims differ");
        const auto ch = parse_int_list(channels, "--channels");
        const auto table = extract_features(v, sp, ch);

        auto out = open_out(output);
        out << "id,voxel_count";
        for (int c : ch)
            for (const char* f : kFieldNames) out << ",c" << c << "_" << f;
        out << "\n";
        char buf[32];
        for (std::uint32_t s = 0; s < table.size(); ++s) {
            out << s << "," << table.voxel_count(s);
            for (double x : table.features(s)) {
                std::snprintf(buf, sizeof buf, "%.17g", x);
                out << "," << buf;
            }
            out << "\n";
        }
        if (!out) throw IoError("failed writing " + output);
        const std::size_t columns = 2 + ch.size() * kFeaturesPerChannel;
        if (json_out) {
            emit({{"command", "features"}, {"output", output}, {"supervoxels", table.size()}, {"columns", columns}});
        } else {
            std::cout << "wrote " << table.size() << " rows x " << columns << " columns to " << output << "\n";
        }
    }
};

struct RagCmd {
    std::string supervoxels, output;
    bool json_out = false;
    void add(CLI::App& app, std::function<void()>& action) {
        auto* c = app.add_subcommand("rag", "dump the region adjacency graph as JSON lines");
        c->add_option("--supervoxels", supervoxels, "supervoxel map header")->required();
        c->add_option("--output", output, "JSON lines file; stdout when omitted");
        c->add_flag("--json", json_out, "print a JSON summary (needs --output)");
        c->callback([this, &action] { action = [this] { run(); }; });
    }
    void run() const {
        if (json_out && output.empty()) throw ParamError("--json needs --output so the edge lines do not mix with it");
        const auto sp = read_labels(supervoxels);
        const auto rag = build_rag(sp);
        std::ofstream file;
        if (!output.empty()) file = open_out(output);
        std::ostream& out = output.empty() ? std::cout : file;
        std::size_t edges = 0;
        for (std::uint32_t a = 0; a < rag.size(); ++a)
            for (const auto& e : rag.neighbours(a)) {
                if (e.neighbour < a) continue;
                out << json{{"a", a}, {"b", e.neighbour}, {"faces", e.faces}}.dump() << "\n";
                ++edges;
            }
        if (!out) throw IoError("failed writing edges");
        if (json_out) {
            emit({{"command", "rag"}, {"output", output}, {"nodes", rag.size()}, {"edges", edges}});
        } else if (!output.empty()) {
            std::cout << "wrote " << edges << " edges over " << rag.size() << " supervoxels to " << output << "\n";
        }
    }
};

json region_json(const RefineResult& r) {
    json j{{"status", r.status == RefineStatus::Refined ? "refined" : "seed_passthrough"},
           {"supervoxels", r.supervoxels},
           {"seed_members", r.seed_members.size()},
           {"members", r.members.size()},
           {"merges", r.log.size()},
           {"voxels", r.mask.foreground()},
           {"tau", r.tau}};
    if (!r.warning.empty()) j["warning"] = r.warning;
    return j;
}

struct RefineCmd {
    std::string volume, roles = "T1=0,T1Gd=1,T2=2,FLAIR=3", seed_wt, seed_tc, out_wt, out_tc, log;
    SlicFlags slic;
    RefineFlags refine;
    bool json_out = false;
    void add(CLI::App& app, std::function<void()>& action) {
        auto* c = app.add_subcommand("refine", "refine WT and TC pseudo-labels on supervoxels");
        c->add_option("--volume", volume, "multi-channel volume header")->required();
        c->add_option("--roles", roles, "channel of each modality, NAME=INDEX list")->capture_default_str();
        c->add_option("--seed-wt", seed_wt, "whole tumour seed mask")->required();
        c->add_option("--seed-tc", seed_tc, "tumour core seed mask")->required();
        refine.add(c);
        slic.add(c);
        c->add_option("--out-wt", out_wt, "refined WT mask to write")->required();
        c->add_option("--out-tc", out_tc, "refined TC mask to write")->required();
        c->add_option("--log", log, "merge log JSON to write");
        c->add_flag("--json", json_out, "print a JSON result");
        c->callback([this, &action] { action = [this] { run(); }; });
    }
    void run() const {
        RefineParams p;
        refine.apply(p);
        slic.apply(p.slic);
        p.validate();
        const auto r = ModalityRoles::parse(roles);
        const auto v = read_volume(volume);
        const auto wt = binary(read_labels(seed_wt));
        const auto tc = binary(read_labels(seed_tc));
        if (wt.dims() != v.dims() || tc.dims() != v.dims()) throw DataError("seed masks and volume dims differ");
        const auto res = refine_case(v, r, wt, tc, p);
        save(res.wt.mask, out_wt);
        save(res.tc.mask, out_tc);
        if (!log.empty()) {
            json records = json::array();
            auto add = [&](const char* region, const RefineResult& rr) {
                for (const auto& m : rr.log)
                    records.push_back(
                        {{"region", region}, {"supervoxel_id", m.supervoxel}, {"similarity", m.similarity}, {"voxels", m.voxels}});
            };
            add("WT", res.wt);
            add("TC", res.tc);
            auto out = open_out(log);
            out << records.dump(2) << "\n";
            if (!out) throw IoError("failed writing " + log);
        }
        for (const auto* rr : {&res.wt, &res.tc})
            if (!rr->warning.empty()) std::cerr << "svx: warning: " << rr->warning << "; seed passed through\n";
        if (json_out) {
            emit({{"command", "refine"}, {"wt", region_json(res.wt)}, {"tc", region_json(res.tc)}});
        } else {
            std::cout << "region  supervoxels  seed_members  members  merges  voxels\n";
            for (auto [name, rr] : {std::pair{"WT", &res.wt}, std::pair{"TC", &res.tc}}) {
                char line[128];
                std::snprintf(line, sizeof line, "%-6s  %11zu  %12zu  %7zu  %6zu  %6zu\n", name, rr->supervoxels,
                              rr->seed_members.size(), rr->members.size(), rr->log.size(), rr->mask.foreground());
                std::cout << line;
            }
        }
    }
};

struct ScheduleCmd {
    ScheduleParams p;
    int epochs = 1000;
    std::string output;
    bool json_out = false;
    void add(CLI::App& app, std::function<void()>& action) {
        auto* c = app.add_subcommand("schedule", "pseudo-label weighting per epoch");
        c->add_option("--alpha-f", p.alpha_f, "final weighting factor")->capture_default_str();
        c->add_option("--t1", p.t1, "epoch where pseudo-labelled batches start")->capture_default_str();
        c->add_option("--t2", p.t2, "epoch where the ramp reaches alpha-f")->capture_default_str();
        c->add_option("--nt", p.n_t, "batches per epoch")->capture_default_str();
        c->add_option("--refresh-period", p.refresh_period, "epochs between pseudo-label refreshes")->capture_default_str();
        c->add_option("--epochs", epochs, "number of epochs to tabulate")->capture_default_str();
        c->add_option("--output", output, "also write the CSV table here");
        c->add_flag("--json", json_out, "print a JSON result");
        c->callback([this, &action] { action = [this] { run(); }; });
    }
    void run() const {
        p.validate();
        if (epochs < 1) throw ParamError("--epochs must be >= 1");
        std::ostringstream csv;
        csv << "epoch,alpha,pseudo_batches\n";
        json rows = json::array();
        for (int e = 0; e < epochs; ++e) {
            const double a = alpha(e, p);
            const int b = pseudo_batches(e, p);
            char buf[64];
            std::snprintf(buf, sizeof buf, "%d,%.17g,%d\n", e, a, b);
            csv << buf;
            rows.push_back({{"epoch", e}, {"alpha", a}, {"pseudo_batches", b}});
        }
        if (!output.empty()) {
            auto out = open_out(output);
            out << csv.str();
            if (!out) throw IoError("failed writing " + output);
        }
        if (json_out) {
            json refresh = epochs >= p.refresh_period ? json(refresh_epochs(epochs, p)) : json::array();
            emit({{"command", "schedule"},
                  {"params", {{"alpha_f", p.alpha_f}, {"t1", p.t1}, {"t2", p.t2}, {"nt", p.n_t}, {"epochs", epochs}}},
                  {"refresh_epochs", refresh},
                  {"rows", rows}});
        } else {
            std::cout << csv.str();
        }
    }
};

struct MetricsCmd {
    std::string pred, gt, output;
    bool json_out = false;
    void add(CLI::App& app, std::function<void()>& action) {
        auto* c = app.add_subcommand("metrics", "DSC, IoU and HD95 of a mask against ground truth");
        c->add_option("--pred", pred, "predicted mask header")->required();
        c->add_option("--gt", gt, "ground truth mask header")->required();
        c->add_option("--output", output, "JSON report to write");
        c->add_flag("--json", json_out, "print the JSON report");
        c->callback([this, &action] { action = [this] { run(); }; });
    }
    void run() const {
        const auto a = binary(read_labels(pred));
        const auto b = binary(read_labels(gt));
        if (a.dims() != b.dims()) throw DataError("prediction and ground truth dims differ");
        const auto r = evaluate(a, b);
        const json j{{"dsc", r.dsc}, {"iou", r.iou}, {"hd95_mm", r.hd95_mm}, {"pred_voxels", r.pred_voxels}, {"gt_voxels", r.gt_voxels}};
        if (!output.empty()) {
            auto out = open_out(output);
            out << j.dump(2) << "\n";
            if (!out) throw IoError("failed writing " + output);
        }
        if (json_out) {
            emit(j);
        } else {
            std::cout << "dsc      " << num(r.dsc) << "\niou      " << num(r.iou) << "\nhd95_mm  " << num(r.hd95_mm)
                      << "\npred     " << r.pred_voxels << "\ngt       " << r.gt_voxels << "\n";
        }
    }
};

struct PhantomCmd {
    PhantomParams p;
    std::string dims = "64,64,64", out_dir;
    bool json_out = false;
    void add(CLI::App& app, std::function<void()>& action) {
        auto* c = app.add_subcommand("phantom", "write a synthetic four-channel tumour phantom");
        c->add_option("--seed", p.seed, "RNG seed")->capture_default_str();
        c->add_option("--dims", dims, "nx,ny,nz")->capture_default_str();
        c->add_option("--blobs", p.wt_blobs, "ellipsoids forming the whole tumour")->capture_default_str();
        c->add_option("--noise", p.noise_sigma, "additive Gaussian noise sigma")->capture_default_str();
        c->add_option("--bias", p.bias_amplitude, "multiplicative bias field amplitude")->capture_default_str();
        c->add_option("--out-dir", out_dir, "directory for vol.mhd, gt_wt.mhd, gt_tc.mhd, params.json")->required();
        c->add_flag("--json", json_out, "print a JSON result");
        c->callback([this, &action] { action = [this] { run(); }; });
    }
    void run() {
        const auto d = parse_int_list(dims, "--dims");
        if (d.size() != 3) throw ParamError("--dims needs three values");
        p.dims = {d[0], d[1], d[2]};
        const auto ph = generate_phantom(p);
        const fs::path dir(out_dir);
        fs::create_directories(dir);
        write_image(ph.volume, dir / "vol.mhd");
        write_image(ph.wt, dir / "gt_wt.mhd");
        write_image(ph.tc, dir / "gt_tc.mhd");

        json contrast = json::object();
        const char* names[] = {"T1", "T1Gd", "T2", "FLAIR"};
        for (int c = 0; c < phantom_channel::kCount; ++c)
            contrast[names[c]] = {{"edema", p.contrast[static_cast<std::size_t>(c)].edema},
                                  {"core", p.contrast[static_cast<std::size_t>(c)].core}};
        const json manifest{{"schema", "svx-phantom/1"},
                            {"seed", p.seed},
                            {"dims", dims_json(p.dims)},
                            {"wt_blobs", p.wt_blobs},
                            {"background", p.background},
                            {"noise_sigma", p.noise_sigma},
                            {"bias_amplitude", p.bias_amplitude},
                            {"contrast", contrast},
                            {"roles", "T1=0,T1Gd=1,T2=2,FLAIR=3"},
                            {"wt_voxels", ph.wt.foreground()},
                            {"tc_voxels", ph.tc.foreground()},
                            {"files", {{"volume", "vol.mhd"}, {"wt", "gt_wt.mhd"}, {"tc", "gt_tc.mhd"}}}};
        auto out = open_out(dir / "params.json");
        out << manifest.dump(2) << "\n";
        if (!out) throw IoError("failed writing params.json");
        if (json_out) {
            emit({{"command", "phantom"}, {"out_dir", out_dir}, {"wt_voxels", ph.wt.foreground()}, {"tc_voxels", ph.tc.foreground()}});
        } else {
            std::cout << "wrote phantom seed " << p.seed << " to " << out_dir << " (WT " << ph.wt.foreground() << " voxels, TC "
                      << ph.tc.foreground() << ")\n";
        }
    }
};

struct BenchCmd {
    BenchParams p;
    SlicFlags slic;
    RefineFlags refine;
    std::string out_dir;
    bool no_overlays = false;
    bool json_out = false;
    void add(CLI::App& app, std::function<void()>& action) {
        auto* c = app.add_subcommand("bench", "phantom suite: corrupt, refine, score");
        c->add_option("--cases", p.cases, "number of phantoms")->capture_default_str();
        c->add_option("--seed", p.seed, "case i uses phantom seed seed+i")->capture_default_str();
        c->add_option("--erode", p.erosion, "seed erosion radius, voxels")->capture_default_str();
        c->add_option("--boundary-noise", p.boundary_noise, "boundary flip probability")->capture_default_str();
        c->add_option("--noise", p.phantom.noise_sigma, "phantom noise sigma")->capture_default_str();
        c->add_option("--bias", p.phantom.bias_amplitude, "phantom bias amplitude")->capture_default_str();
        refine.add(c);
        slic.add(c);
        c->add_option("--out-dir", out_dir, "write summary.json, cases.csv and overlay PNGs here");
        c->add_flag("--no-overlays", no_overlays, "skip the PNG overlays");
        c->add_flag("--json", json_out, "print the summary JSON");
        c->callback([this, &action] { action = [this] { run(); }; });
    }
    void run() {
        refine.apply(p.refine);
        slic.apply(p.refine.slic);
        run_bench_command(p, out_dir, !no_overlays, json_out);
    }
};

int exit_code_for(const Error& e) {
    const std::string k = e.kind();
    if (k == "ParamError" || k == "ConfigError") return 1;
    return 2;
}

}  // namespace

int run(std::vector<std::string> args) {
    CLI::App app{"svx: supervoxel pseudo-label refinement toolkit", "svx"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    std::string config_help;
    app.add_option("--config", config_help, "JSON config (schema svx-config/1); command-line flags win");

    std::function<void()> action;
    SlicCmd slic_cmd;
    FeaturesCmd features_cmd;
    RagCmd rag_cmd;
    RefineCmd refine_cmd;
    ScheduleCmd schedule_cmd;
    MetricsCmd metrics_cmd;
    PhantomCmd phantom_cmd;
    BenchCmd bench_cmd;
    slic_cmd.add(app, action);
    features_cmd.add(app, action);
    rag_cmd.add(app, action);
    refine_cmd.add(app, action);
    schedule_cmd.add(app, action);
    metrics_cmd.add(app, action);
    phantom_cmd.add(app, action);
    bench_cmd.add(app, action);

    try {
        // pull --config out and splice its tokens in right after the subcommand
        std::optional<std::string> config;
        std::vector<std::string> rest;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config") {
                if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a file");
                config = args[++i];
            } else if (args[i].rfind("--config=", 0) == 0) {
                config = args[i].substr(9);
            } else {
                rest.push_back(args[i]);
            }
        }
        if (config) {
            auto sub = std::find_if(rest.begin(), rest.end(), [&](const std::string& a) {
                return app.get_subcommand_no_throw(a) != nullptr;
            });
            if (sub != rest.end()) {
                CLI::App* cmd = app.get_subcommand(*sub);
                auto tokens = config_tokens(*config, *sub, [cmd](const std::string& key) {
                    const CLI::Option* o = cmd->get_option_no_throw("--" + key);
                    if (!o) return 0;
                    return o->get_expected_min() == 0 ? 1 : 2;
                });
                rest.insert(sub + 1, tokens.begin(), tokens.end());
            }
        }
        std::reverse(rest.begin(), rest.end());
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "svx: " << e.kind() << ": " << e.what() << "\n";
        return exit_code_for(e);
    }

    try {
        if (action) action();
        return 0;
    } catch (const Error& e) {
        std::cerr << "svx: " << e.kind() << ": " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "svx: IoError: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "svx: error: " << e.what() << "\n";
        return 2;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(std::move(args));
}

}  // namespace svx::cli
