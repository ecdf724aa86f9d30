/*
 * Copyright 2026 The dvfsleak Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// dvfsleak: command-line experiment runner.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "dvfsleak/analysis.hpp"
#include "dvfsleak/attacks.hpp"
#include "dvfsleak/error.hpp"
#include "dvfsleak/experiment.hpp"
#include "dvfsleak/preset_io.hpp"
#include "dvfsleak/trace_io.hpp"

namespace {

using namespace dvfsleak;

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kNotConverged = 3, kCalibration = 4 };

struct CommonFlags {
    std::string config;
    std::string preset;
    std::string workload;
    std::optional<double> duration;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> clamp;
    std::string noise;
    std::string out;
};

void add_common(CLI::App *cmd, CommonFlags &f, bool with_workload = true) {
    cmd->add_option("-c,--config", f.config, "Experiment config file");
    cmd->add_option("--preset", f.preset, "Device preset name");
    if (with_workload)
        cmd->add_option("--workload", f.workload, "Workload spec, e.g. add or shift-b:shift=4");
    cmd->add_option("--duration", f.duration, "Simulated seconds");
    cmd->add_option("--seed", f.seed, "Noise seed (required)");
    cmd->add_option("--clamp", f.clamp, "Pin the P-state index, bypassing the governor");
    cmd->add_option("--noise", f.noise, "default | none | power,temp,jitter sigmas");
    cmd->add_option("--out", f.out, "Output file");
}

ExperimentConfig resolve(const CommonFlags &f) {
    ExperimentConfig e;
    if (!f.config.empty())
        e = load_experiment_config(f.config);
    if (!f.preset.empty())
        e.preset = f.preset;
    if (!f.workload.empty())
        e.workload = f.workload;
    if (f.duration)
        e.duration = *f.duration;
    if (f.seed)
        e.seed = *f.seed;
    if (f.clamp)
        e.clamp = *f.clamp;
    if (!f.out.empty())
        e.out = f.out;
    if (!e.seed)
        throw ConfigError(f.config.empty() ? "command line" : f.config, 0,
                          "a seed is required (--seed or [experiment] seed)");
    if (!f.noise.empty()) {
        e.noise = parse_noise(f.noise, *e.seed);
    } else {
        e.noise.seed = *e.seed;
    }
    if (!(e.duration > 0.0))
        throw ConfigError("command line", 0, "duration must be positive");
    return e;
}

void require_field(const std::string &value, const char *what) {
    if (value.empty())
        throw ConfigError("command line", 0, fmt::format("missing {}", what));
}

DevicePreset load_preset(const std::string &name) {
    require_field(name, "preset (--preset or [experiment] preset)");
    return PresetCatalog::from_environment().load(name);
}

void emit(const std::string &path, const std::string &content) {
    if (path.empty() || path == "-")
        std::cout << content;
    else
        write_file_atomic(path, content);
}

std::string steady_summary(const Trace &trace, const DevicePreset &preset) {
    std::string s = fmt::format("samples: {}  dt: {} s\n", trace.size(), trace.dt);
    const auto ttt = time_to_throttle(trace);
    s += ttt ? fmt::format("time to throttle: {:.2f} s\n", *ttt)
             : std::string("time to throttle: never\n");
    try {
        const SteadyStateWindow w = detect_steady_state(trace);
        const SteadyStateWindow tail =
            window_means(trace, std::max(w.start, trace.duration() - 200.0), std::numeric_limits<double>::infinity());
        s += fmt::format("steady state from {:.2f} s\n", w.start);
        s += fmt::format("steady means (last {:.0f} s): {:.4f} GHz  {:.3f} W  {:.2f} C\n",
                         tail.end - tail.start, tail.mean_freq / 1e9, tail.mean_power,
                         tail.mean_temp);
        s += fmt::format("constraint: {}\n", to_string(classify_constraint(trace, preset)));
    } catch (const NotConvergedError &) {
        s += "steady state: not reached\n";
    } catch (const InvalidArgument &) {
        s += "steady state: trace shorter than the detection window\n";
    }
    return s;
}

int cmd_simulate(const CommonFlags &f) {
    const ExperimentConfig e = resolve(f);
    const DevicePreset preset = load_preset(e.preset);
    require_field(e.workload, "workload (--workload or [experiment] workload)");
    const Workload w = build_workload(parse_workload_spec(e.workload));
    const Trace trace = run(preset, w, e.duration, e.noise, e.clamp);
    emit(e.out, format_trace_csv(trace));
    (e.out.empty() ? std::cerr : std::cout) << steady_summary(trace, preset);
    return kOk;
}

int cmd_sweep(const CommonFlags &f, std::string family, std::vector<double> params,
              std::optional<double> tail) {
    ExperimentConfig e = resolve(f);
    if (family.empty())
        family = e.sweep_family;
    if (params.empty())
        params = e.sweep_params;
    require_field(family, "sweep family (--family or [sweep] family)");
    const DevicePreset preset = load_preset(e.preset);
    const SweepFamily &fam = sweep_family(family);
    if (params.empty())
        params = fam.default_params;
    SweepOptions opts;
    opts.duration = e.duration;
    opts.tail = tail.value_or(e.sweep_tail);
    opts.noise = e.noise;
    const SweepResult r = sweep(preset, sweep_points(fam, params), opts);
    const std::string csv = format_sweep_csv(r);
    emit(e.out, csv);
    if (!e.out.empty()) {
        std::cout << fmt::format("{} on {}: {} points, frequency range {:.4f} GHz\n",
                                 family, preset.name, r.params.size(), r.freq_range() / 1e9);
        for (const auto &[name, c] :
             {std::pair{"corr_freq", r.corr_freq}, std::pair{"corr_power", r.corr_power},
              std::pair{"corr_temp", r.corr_temp}})
            std::cout << fmt::format("{} = {} ({})\n", name,
                                     c ? fmt::format("{:.4f}", *c) : "undefined",
                                     correlation_verdict(c));
    }
    return kOk;
}

std::string metrics_line(const AttackResult &r) {
    return fmt::format("{},{},{},{}", r.accuracy, r.false_positive_rate,
                       r.false_negative_rate, r.seconds_per_pixel);
}

int cmd_attack_pixel(const ExperimentConfig &e, const std::string &image_flag) {
    const std::string image = image_flag.empty() ? e.image : image_flag;
    require_field(image, "target image (--image or [attack] image)");
    const DevicePreset preset = load_preset(e.preset);
    const TargetImage target = load_pnm(image);
    PixelAttackOptions opts = e.pixel;
    opts.clamp = e.clamp;
    const AttackResult r = steal_image(preset, target, e.noise, opts);
    std::string report = "x,y,truth,guess\n";
    for (std::size_t y = 0; y < target.height; ++y)
        for (std::size_t x = 0; x < target.width; ++x)
            report += fmt::format("{},{},{},{}\n", x, y,
                                  target.at(x, y) == PixelColor::white() ? "white" : "black",
                                  r.recovered_image.at(x, y) == PixelColor::white() ? "white"
                                                                                    : "black");
    const std::string summary =
        "pixels,accuracy,fpr,fnr,seconds_per_pixel,threshold_s,margin\n" +
        fmt::format("{},{},{},{}\n", target.pixels.size(), metrics_line(r),
                    r.calibration->threshold, r.calibration->margin);
    emit(e.out, report);
    if (!e.out.empty()) {
        write_file_atomic(e.out + ".summary.csv", summary);
        write_file_atomic(e.out + ".pbm", format_pnm(r.recovered_image));
    }
    std::cout << summary;
    return kOk;
}

int cmd_attack_history(const ExperimentConfig &e, const std::string &links_flag) {
    const std::string links_path = links_flag.empty() ? e.links : links_flag;
    require_field(links_path, "link list (--links or [attack] links)");
    const DevicePreset preset = load_preset(e.preset);
    const std::vector<Link> links = load_links_csv(links_path);
    PixelAttackOptions opts = e.pixel;
    opts.clamp = e.clamp;
    const AttackResult r = sniff_history(preset, links, e.noise, opts);
    std::string report = "url,visited,guess\n";
    for (std::size_t i = 0; i < links.size(); ++i)
        report += fmt::format("{},{},{}\n", links[i].url, links[i].visited ? 1 : 0,
                              r.recovered_links[i] ? 1 : 0);
    const std::string summary =
        "links,accuracy,fpr,fnr,seconds_per_link\n" +
        fmt::format("{},{}\n", links.size(), metrics_line(r));
    emit(e.out, report);
    if (!e.out.empty())
        write_file_atomic(e.out + ".summary.csv", summary);
    std::cout << summary;
    return kOk;
}

int cmd_attack_fingerprint(const ExperimentConfig &e, const std::string &catalog_flag) {
    const std::string catalog = catalog_flag.empty() ? e.catalog : catalog_flag;
    require_field(catalog, "profile catalog (--catalog or [attack] catalog)");
    const std::vector<WebsiteProfile> profiles =
        profiles_from_config(KvConfig::load(catalog));
    const PresetCatalog presets = PresetCatalog::from_environment();
    const DevicePreset train = presets.load(e.train_preset);
    const DevicePreset test = presets.load(e.test_preset);
    const auto templates = fingerprint_train(profiles, train, e.noise, e.fingerprint);
    const FingerprintEvaluation ev =
        fingerprint_evaluate(profiles, templates, test, e.noise, e.fingerprint);
    const std::string report =
        fmt::format("rank,accuracy,baseline\n1,{},{}\n2,{},{}\n5,{},{}\n", ev.top1,
                    1.0 / profiles.size(), ev.top2, 2.0 / profiles.size(), ev.top5,
                    5.0 / profiles.size());
    emit(e.out, report);
    if (!e.out.empty())
        std::cout << fmt::format("trained on {}, tested on {}, {} profiles\n", train.name,
                                 test.name, profiles.size())
                  << report;
    return kOk;
}

int cmd_plotdata(const std::vector<std::string> &files, const std::string &out) {
    if (files.empty())
        throw ConfigError("command line", 0, "plotdata needs at least one trace file");
    std::vector<std::pair<std::string, Trace>> traces;
    for (const std::string &f : files) {
        std::string id = std::filesystem::path(f).stem().string();
        for (const auto &[existing, t] : traces)
            if (existing == id)
                id = fmt::format("{}#{}", id, traces.size());
        traces.emplace_back(id, load_trace_csv(f));
    }
    emit(out, format_long_csv(traces));
    return kOk;
}

int cmd_presets() {
    const PresetCatalog cat = PresetCatalog::from_environment();
    std::cout << fmt::format("catalog: {}\n", cat.directory().string());
    std::cout << fmt::format("{:<16} {:<5} {:>7} {:>10} {:>8} {:>8}\n", "name", "class",
                             "states", "f_max_ghz", "p_max_w", "t_max_c");
    for (const std::string &name : cat.names()) {
        const DevicePreset p = cat.load(name);
        std::cout << fmt::format("{:<16} {:<5} {:>7} {:>10.3f} {:>8.1f} {:>8.1f}\n", p.name,
                                 to_string(p.device_class), p.curve.size(),
                                 p.limits.f_max / 1e9, p.limits.p_max, p.limits.t_max);
    }
    return kOk;
}

int cmd_catalog(std::uint64_t seed, std::size_t count, const std::string &out) {
    emit(out, format_profiles(generate_website_catalog(seed, count)));
    return kOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Simulator and attack toolkit for data-dependent DVFS throttling",
                 "dvfsleak"};
    app.require_subcommand(1);

    CommonFlags sim_flags;
    auto *sim = app.add_subcommand("simulate", "Run one workload and write its trace CSV");
    add_common(sim, sim_flags);

    CommonFlags sweep_flags;
    std::string family;
    std::vector<double> params;
    std::optional<double> tail;
    auto *sw = app.add_subcommand("sweep", "Sweep a workload family and correlate");
    add_common(sw, sweep_flags, false);
    sw->add_option("--family", family, "Sweep family")
        ->check(CLI::IsMember(sweep_family_names()));
    sw->add_option("--params", params, "Parameter values")->delimiter(',');
    sw->add_option("--tail", tail, "Seconds averaged at the end of each run");

    CommonFlags atk_flags;
    std::string kind, image, links, catalog;
    auto *atk = app.add_subcommand("attack", "Run pixel, history or fingerprint attack");
    atk->add_option("kind", kind, "pixel | history | fingerprint")
        ->required()
        ->check(CLI::IsMember({"pixel", "history", "fingerprint"}));
    add_common(atk, atk_flags, false);
    atk->add_option("--image", image, "Target image (P1/P2)");
    atk->add_option("--links", links, "Link list CSV");
    atk->add_option("--catalog", catalog, "Website profile catalog");

    std::vector<std::string> plot_files;
    std::string plot_out;
    auto *plot = app.add_subcommand("plotdata", "Merge traces into long-format CSV");
    plot->add_option("traces", plot_files, "Trace CSV files");
    plot->add_option("--out", plot_out, "Output file");

    auto *presets = app.add_subcommand("presets", "List the preset catalog");

    std::uint64_t cat_seed = 0;
    std::size_t cat_count = 100;
    std::string cat_out;
    auto *cat = app.add_subcommand("catalog", "Generate a synthetic website catalog");
    cat->add_option("--seed", cat_seed, "Generator seed")->required();
    cat->add_option("--count", cat_count, "Number of profiles");
    cat->add_option("--out", cat_out, "Output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(sim_flags);
        if (sw->parsed())
            return cmd_sweep(sweep_flags, family, params, tail);
        if (atk->parsed()) {
            const ExperimentConfig e = resolve(atk_flags);
            if (kind == "pixel")
                return cmd_attack_pixel(e, image);
            if (kind == "history")
                return cmd_attack_history(e, links);
            return cmd_attack_fingerprint(e, catalog);
        }
        if (plot->parsed())
            return cmd_plotdata(plot_files, plot_out);
        if (presets->parsed())
            return cmd_presets();
        if (cat->parsed())
            return cmd_catalog(cat_seed, cat_count, cat_out);
    } catch (const ConfigError &e) {
        std::cerr << "dvfsleak: config error: " << e.what() << "\n";
        return kConfig;
    } catch (const NotConvergedError &e) {
        std::cerr << "dvfsleak: not converged: " << e.what() << "\n";
        return kNotConverged;
    } catch (const CalibrationFailedError &e) {
        std::cerr << "dvfsleak: calibration failed: " << e.what() << "\n";
        return kCalibration;
    } catch (const InvalidArgument &e) {
        std::cerr << "dvfsleak: invalid argument: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception &e) {
        std::cerr << "dvfsleak: error: " << e.what() << "\n";
        return kOther;
    }
    return kOther;
}
