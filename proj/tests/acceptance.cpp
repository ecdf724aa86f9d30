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

// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "dvfsleak/analysis.hpp"
#include "dvfsleak/attacks.hpp"
#include "dvfsleak/error.hpp"
#include "dvfsleak/experiment.hpp"
#include "dvfsleak/preset_io.hpp"
#include "dvfsleak/simulator.hpp"
#include "dvfsleak/workload.hpp"

namespace dvfsleak {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string &what) {
        pass = pass && ok;
        notes.push_back(fmt::format("{}{}", ok ? "" : "FAILED ", what));
    }
};

const PresetCatalog &catalog() {
    static const PresetCatalog cat(DVFSLEAK_TEST_SOURCE_DIR "/presets");
    return cat;
}

DevicePreset preset(const std::string &name) { return catalog().load(name); }

NoiseModel default_noise(std::uint64_t seed = 1) {
    NoiseModel n;
    n.seed = seed;
    return n;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string corr_str(std::optional<double> c) {
    return c ? fmt::format("{:.3f}", *c) : std::string("undefined");
}

bool within(double got, double want, double rel) {
    return std::abs(got - want) <= rel * std::abs(want);
}

SweepResult family_sweep(const std::string &preset_name, const std::string &family) {
    const SweepFamily &fam = sweep_family(family);
    SweepOptions opts;
    opts.noise = default_noise();
    return sweep(preset(preset_name), sweep_points(fam, fam.default_params), opts);
}

std::string describe(const SweepResult &r) {
    return fmt::format("corr f/p/t = {}/{}/{}, range {:.3f} GHz", corr_str(r.corr_freq),
                       corr_str(r.corr_power), corr_str(r.corr_temp), r.freq_range() / 1e9);
}

bool at_most(std::optional<double> c, double v) { return c && *c <= v; }
bool at_least(std::optional<double> c, double v) { return c && *c >= v; }
bool null_corr(std::optional<double> c) { return !c || std::abs(*c) <= kNoCorrelationThreshold; }

Outcome constraint_taxonomy() {
    Outcome o;
    const std::array<std::pair<const char *, ConstraintClass>, 3> want{{
        {"m1-air", ConstraintClass::ThermallyConstrained},
        {"rx6600", ConstraintClass::PowerConstrained},
        {"rtx3060", ConstraintClass::FrequencyConstrained},
    }};
    const Workload heavy = build_workload(parse_workload_spec("div:lanes=8"));
    for (const auto &[name, cls] : want) {
        const DevicePreset p = preset(name);
        const Clock::time_point t0 = Clock::now();
        const Trace t = run(p, heavy, 2000.0, default_noise());
        const ConstraintClass got = classify_constraint(t, p);
        const double wall = seconds_since(t0);
        o.check(got == cls, fmt::format("{} {}", name, to_string(got)));
        o.check(wall < 10.0, fmt::format("{} {:.2f} s", name, wall));
    }
    return o;
}

Outcome cooling_study() {
    Outcome o;
    struct Cell {
        double temp, freq, power;
    };
    // Measured add / fadd averages per device.
    const std::array<const char *, 4> names{"m1-air", "m1-air-pad", "m1-pro", "m1-mini"};
    const std::array<std::array<Cell, 2>, 4> table{{
        {{{90.6, 3.0, 14.0}, {91.7, 2.8, 10.9}}},
        {{{77.8, 3.2, 14.8}, {84.3, 3.1, 12.4}}},
        {{{66.5, 3.2, 14.6}, {70.3, 3.2, 12.3}}},
        {{{44.3, 3.2, 13.7}, {46.9, 3.2, 11.8}}},
    }};
    const std::array<const char *, 2> kinds{"add", "fadd"};
    std::array<std::array<SteadyStateWindow, 2>, 4> got{};
    std::array<bool, 4> throttles{};
    std::array<bool, 4> holds_top{};
    bool cells_ok = true;
    double worst = 0.0;
    for (std::size_t d = 0; d < names.size(); ++d) {
        const DevicePreset p = preset(names[d]);
        holds_top[d] = true;
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            const Trace t = run(p, build_workload(parse_workload_spec(kinds[k])), 2000.0,
                                default_noise());
            const double end = t.duration();
            got[d][k] = window_means(t, std::max(detect_steady_state(t).start, end - 200.0), end);
            const bool at_top = got[d][k].mean_freq >= p.curve.top().frequency * (1.0 - 1e-9);
            holds_top[d] = holds_top[d] && at_top;
            throttles[d] = throttles[d] || !at_top;
            const Cell &want = table[d][k];
            for (const auto &[g, w] : {std::pair{got[d][k].mean_temp, want.temp},
                                       std::pair{got[d][k].mean_freq / 1e9, want.freq},
                                       std::pair{got[d][k].mean_power, want.power}}) {
                worst = std::max(worst, std::abs(g - w) / w);
                cells_ok = cells_ok && within(g, w, 0.10);
            }
        }
    }
    o.check(cells_ok, fmt::format("all 24 cells within 10% (worst {:.1f}%)", 100.0 * worst));
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        bool decreasing = true;
        for (std::size_t d = 1; d < names.size(); ++d)
            decreasing = decreasing && got[d][k].mean_temp < got[d - 1][k].mean_temp;
        o.check(decreasing,
                fmt::format("{} temps {:.1f} > {:.1f} > {:.1f} > {:.1f}", kinds[k],
                            got[0][k].mean_temp, got[1][k].mean_temp, got[2][k].mean_temp,
                            got[3][k].mean_temp));
    }
    o.check(throttles[0] && throttles[1], "passive presets throttle");
    o.check(holds_top[2] && holds_top[3], "fan presets hold the top state");
    return o;
}

Outcome hd_sweep(const std::string &family) {
    Outcome o;
    const SweepResult r = family_sweep("m1-air", family);
    o.check(at_most(r.corr_freq, -0.9) && at_most(r.corr_power, -0.9) && null_corr(r.corr_temp),
            describe(r));
    return o;
}

Outcome additivity() {
    Outcome o;
    const SweepResult b = family_sweep("m1-air", "shift-b");
    const SweepResult c = family_sweep("m1-air", "shift-c");
    const SweepResult bc = family_sweep("m1-air", "ror-inplace");
    const double sum = b.freq_range() + c.freq_range();
    o.check(within(bc.freq_range(), sum, 0.15),
            fmt::format("combined range {:.3f} GHz vs {:.3f} + {:.3f} GHz",
                        bc.freq_range() / 1e9, b.freq_range() / 1e9, c.freq_range() / 1e9));
    o.check(at_most(bc.corr_freq, -0.95), fmt::format("combined corr_freq {}", corr_str(bc.corr_freq)));
    return o;
}

Outcome cpu_hw_null() {
    Outcome o;
    const SweepResult r = family_sweep("m1-air", "and-hw");
    o.check(null_corr(r.corr_freq) && null_corr(r.corr_power), describe(r));
    return o;
}

Outcome gpu_hd() {
    Outcome o;
    const SweepResult m1 = family_sweep("m1-air-gpu", "gpu-shift");
    o.check(at_most(m1.corr_freq, -0.9) && at_most(m1.corr_power, -0.9), "m1-air-gpu " + describe(m1));
    const SweepResult amd = family_sweep("rx6600", "gpu-shift");
    o.check(at_most(amd.corr_freq, -0.9) && at_least(amd.corr_power, 0.5) &&
                at_least(amd.corr_temp, 0.6),
            "rx6600 " + describe(amd));
    const SweepResult nv = family_sweep("rtx3060", "gpu-shift");
    o.check(nv.freq_range() == 0.0 && at_least(nv.corr_temp, 0.7) && at_least(nv.corr_power, 0.8),
            "rtx3060 " + describe(nv));
    return o;
}

Outcome gpu_hw() {
    Outcome o;
    const SweepResult m1 = family_sweep("m1-air-gpu", "gpu-and");
    o.check(at_most(m1.corr_freq, -0.9) && at_most(m1.corr_power, -0.9), "m1-air-gpu " + describe(m1));
    const SweepResult amd = family_sweep("rx6600", "gpu-and");
    o.check(at_most(amd.corr_freq, -0.9) && at_least(amd.corr_power, 0.9) &&
                at_least(amd.corr_temp, 0.5),
            "rx6600 " + describe(amd));
    return o;
}

Outcome throttle_timing() {
    Outcome o;
    const DevicePreset p = preset("pixel6");
    const Workload zero = build_workload(parse_workload_spec("add-const:addend=0"));
    const Workload one = build_workload(parse_workload_spec("add-const:addend=1"));
    int wins = 0;
    double sum0 = 0.0, sum1 = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto t0 = time_to_throttle(run(p, zero, 600.0, default_noise(seed)));
        const auto t1 = time_to_throttle(run(p, one, 600.0, default_noise(seed)));
        if (t0 && t1 && *t1 < *t0) {
            ++wins;
            sum0 += *t0;
            sum1 += *t1;
        }
    }
    o.check(wins == 20, fmt::format("add-1 throttles first in {}/20 seeds (mean {:.1f} s vs {:.1f} s)",
                                    wins, wins ? sum1 / wins : 0.0, wins ? sum0 / wins : 0.0));
    return o;
}

double mean(const std::vector<double> &v) {
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

Outcome clamp_root_cause() {
    Outcome o;
    const DevicePreset p = preset("rx6600");
    const NoiseModel noise = default_noise();
    PixelAttackOptions opts;
    opts.clamp = p.curve.top_index() / 2;
    RenderSession clamped(p, noise, opts);
    clamped.warm_up();
    const double black = mean(clamped.measure(PixelColor::black()));
    const double white = mean(clamped.measure(PixelColor::white()));
    o.check(std::abs(white - black) <= 3.0 * noise.timing_jitter_sigma,
            fmt::format("clamped |white - black| = {:.2f} us", 1e6 * std::abs(white - black)));

    RenderSession unclamped(p, noise, PixelAttackOptions{});
    unclamped.warm_up();
    const std::vector<double> fb = unclamped.measure(PixelColor::black());
    const std::vector<double> fw = unclamped.measure(PixelColor::white());
    const double sep = separation_score(fb, fw);
    o.check(sep >= 2.0, fmt::format("unclamped separation {:.1f}", sep));
    return o;
}

Outcome pixel_stealing() {
    Outcome o;
    const DevicePreset p = preset("rx6600");
    const TargetImage logo = load_pnm(DVFSLEAK_TEST_SOURCE_DIR "/data/logo64.pbm");
    o.check(logo.width == 64 && logo.height == 64 && logo.is_binary(), "64x64 binary target");
    Clock::time_point t0 = Clock::now();
    const AttackResult noisy = steal_image(p, logo, default_noise());
    const double wall = seconds_since(t0);
    o.check(noisy.accuracy >= 0.9, fmt::format("default noise accuracy {:.4f}", noisy.accuracy));
    o.check(wall < 60.0, fmt::format("{:.1f} s wall", wall));
    const AttackResult quiet = steal_image(p, logo, NoiseModel::none(1));
    o.check(quiet.accuracy == 1.0, fmt::format("zero noise accuracy {:.4f}", quiet.accuracy));
    return o;
}

Outcome history_sniffing() {
    Outcome o;
    const std::vector<Link> links = load_links_csv(DVFSLEAK_TEST_SOURCE_DIR "/data/links50.csv");
    const DevicePreset p = preset("m1-air");
    o.check(links.size() == 50 && p.device_class == DeviceClass::Cpu, "50 links, CPU preset");
    const AttackResult r = sniff_history(p, links, default_noise());
    o.check(r.accuracy >= 0.9 && r.false_positive_rate <= 0.1 && r.false_negative_rate <= 0.1,
            fmt::format("accuracy {:.2f}, FPR {:.2f}, FNR {:.2f}", r.accuracy,
                        r.false_positive_rate, r.false_negative_rate));
    return o;
}

Outcome fingerprinting() {
    Outcome o;
    const std::vector<WebsiteProfile> profiles =
        profiles_from_config(KvConfig::load(DVFSLEAK_TEST_SOURCE_DIR "/data/websites.cfg"));
    o.check(profiles.size() == 100, fmt::format("{} profiles", profiles.size()));
    const DevicePreset train = preset("m1-mini");
    const DevicePreset test = preset("m1-air");
    const auto templates = fingerprint_train(profiles, train, default_noise());
    const FingerprintEvaluation cross = fingerprint_evaluate(profiles, templates, test, default_noise(2));
    o.check(cross.top5 >= 0.10, fmt::format("cross-device top-5 {:.2f} (top-1 {:.2f})",
                                            cross.top5, cross.top1));
    const NoiseModel quiet = NoiseModel::none(1);
    const auto clean = fingerprint_train(profiles, train, quiet);
    const FingerprintEvaluation self = fingerprint_evaluate(profiles, clean, train, quiet);
    o.check(self.top1 == 1.0, fmt::format("zero-noise training top-1 {:.2f}", self.top1));
    return o;
}

double two_pass_pearson(const std::vector<double> &x, const std::vector<double> &y) {
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

ActivityFactor xor_popcount_oracle(const Workload &w, std::uint64_t ticks) {
    const double width = w.operands.width();
    std::uint64_t a = 0, b = 0, c = 0, hw = 0;
    OperandPair prev{};
    for (std::uint64_t k = 0; k < ticks; ++k) {
        const OperandPair cur = w.operands.at(k);
        a += std::popcount(cur.input ^ cur.output);
        hw += std::popcount(cur.output);
        if (k > 0) {
            b += std::popcount(cur.output ^ prev.output);
            c += std::popcount(cur.input ^ prev.input);
        }
        prev = cur;
    }
    const double n = static_cast<double>(ticks);
    ActivityFactor f;
    f.base = static_cast<double>(w.parallelism) / kIssueWidth;
    f.hd_a = static_cast<double>(a) / (n * width);
    f.hw = static_cast<double>(hw) / (n * width);
    f.hd_b = static_cast<double>(b) / ((n - 1) * width);
    f.hd_c = static_cast<double>(c) / ((n - 1) * width);
    return f;
}

Outcome oracles() {
    Outcome o;
    std::mt19937_64 g(14);
    std::normal_distribution<double> nd(0.0, 1.0);
    double worst = 0.0;
    for (int rep = 0; rep < 500; ++rep) {
        const std::size_t n = 3 + static_cast<std::size_t>(rep) % 200;
        std::vector<double> x(n), y(n);
        const double slope = nd(g);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = 100.0 * (rep % 5) + nd(g);
            y[i] = slope * x[i] + nd(g);
        }
        worst = std::max(worst, std::abs(pearson(x, y) - two_pass_pearson(x, y)));
    }
    o.check(worst <= 1e-12, fmt::format("pearson max error {:.1e}", worst));

    std::vector<Workload> corpus;
    for (unsigned s = 0; s <= 16; s += 4) {
        corpus.push_back(build_ror_isolation(s));
        corpus.push_back(build_lsl_lsr_component_b(s));
        corpus.push_back(build_lsl_lsr_component_c(s));
        corpus.push_back(build_ror_inplace(s));
        corpus.push_back(build_shift_kernel(s));
    }
    for (unsigned hw : {0u, 17u, 64u})
        corpus.push_back(build_cpu_and(hw));
    for (InstructionKind k : kAllInstructionKinds)
        corpus.push_back(build_instruction_loop(k, 5));
    corpus.push_back(build_filter_workload(PixelColor::white(), 1e7));
    corpus.push_back(build_render_workload());
    std::size_t exact = 0;
    for (const Workload &w : corpus) {
        const ActivityFactor want = xor_popcount_oracle(w, 4096);
        exact += decompose_components(w, 4096) == want && decompose_components_serial(w, 4096) == want;
    }
    o.check(exact == corpus.size(),
            fmt::format("decompose exact on {}/{} workloads", exact, corpus.size()));

    double worst_t = 0.0;
    for (const char *name : {"m1-air", "m1-mini", "rx6600", "pixel6"}) {
        const ThermalParams th = preset(name).thermal;
        const double power = 10.0;
        const double dt = kDefaultDt;
        const double tau = (th.r_th + th.r_die) * (th.c_th + th.c_die);
        const auto steps = static_cast<long>(std::ceil(10.0 * tau / dt));
        ThermalState s{th.ambient, th.ambient};
        for (long i = 0; i < steps; ++i)
            s = thermal_network_step(s, power, dt, th);
        worst_t = std::max(worst_t, std::abs(s.case_temp - (th.ambient + power * th.r_th)));
        worst_t = std::max(worst_t,
                           std::abs(s.die - (th.ambient + power * (th.r_th + th.r_die))));
    }
    o.check(worst_t <= 0.01, fmt::format("thermal fixed point max error {:.1e} C", worst_t));
    return o;
}

int run_cli(const std::string &args) {
    const std::string cmd = fmt::format("\"{}\" {} >/dev/null 2>&1", DVFSLEAK_CLI_PATH, args);
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "dvfsleak-acceptance";
    fs::remove_all(root);
    const std::string cfg = DVFSLEAK_TEST_SOURCE_DIR "/configs/";
    const std::vector<std::pair<std::string, std::string>> commands{
        {"simulate", "simulate -c " + cfg + "simulate-m1-air.cfg"},
        {"sweep", "sweep -c " + cfg + "sweep-shift-b.cfg"},
        {"pixel", "attack pixel -c " + cfg + "pixel-rx6600.cfg"},
        {"history", "attack history -c " + cfg + "history-m1-air.cfg"},
        {"fingerprint", "attack fingerprint -c " + cfg + "fingerprint-m1.cfg"},
        {"catalog", "catalog --seed 2026 --count 100"},
    };
    for (const char *run_name : {"a", "b"}) {
        fs::create_directories(root / run_name);
        for (const auto &[id, args] : commands) {
            const fs::path out = root / run_name / (id + ".out");
            const int code = run_cli(args + " --out " + out.string());
            if (code != 0)
                o.check(false, fmt::format("{} exited {}", id, code));
        }
    }
    std::size_t files = 0, same = 0;
    for (const fs::directory_entry &e : fs::directory_iterator(root / "a")) {
        ++files;
        const fs::path twin = root / "b" / e.path().filename();
        same += fs::exists(twin) && slurp(e.path()) == slurp(twin);
    }
    o.check(files >= commands.size() && same == files,
            fmt::format("{}/{} output files byte-identical", same, files));
    fs::remove_all(root);
    return o;
}

} // namespace
} // namespace dvfsleak

int main() {
    using namespace dvfsleak;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"constraint-class taxonomy", constraint_taxonomy},
        {"cooling study", cooling_study},
        {"component B sweep", [] { return hd_sweep("shift-b"); }},
        {"component C sweep", [] { return hd_sweep("shift-c"); }},
        {"B+C additivity", additivity},
        {"CPU Hamming-weight null", cpu_hw_null},
        {"GPU Hamming-distance sweep", gpu_hd},
        {"GPU Hamming-weight sweep", gpu_hw},
        {"data-dependent throttle timing", throttle_timing},
        {"frequency clamp root cause", clamp_root_cause},
        {"pixel stealing", pixel_stealing},
        {"history sniffing", history_sniffing},
        {"website fingerprinting", fingerprinting},
        {"oracle suites", oracles},
        {"CLI determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto &[name, fn] = criteria[i];
        const Clock::time_point t0 = Clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception &e) {
            o.check(false, fmt::format("exception: {}", e.what()));
        }
        std::string detail;
        for (const std::string &n : o.notes)
            detail += (detail.empty() ? "" : "; ") + n;
        std::cout << fmt::format("{} {:>2}. {} ({:.1f} s): {}\n", o.pass ? "PASS" : "FAIL", i + 1,
                                 name, seconds_since(t0), detail)
                  << std::flush;
        failures += !o.pass;
    }
    std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failures,
                             criteria.size());
    return failures == 0 ? 0 : 1;
}
