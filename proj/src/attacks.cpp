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

#include "dvfsleak/attacks.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/core.h>

#include "dvfsleak/error.hpp"

namespace dvfsleak {

namespace {

constexpr PixelColor kGrey{0xFF, 0x0F, 0x00}; // Hamming weight 12

double mean_of(const std::vector<double> &v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double> &v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return v.size() > 1 ? s / static_cast<double>(v.size() - 1) : 0.0;
}

std::string next_token(std::istream &in, const std::string &source) {
    std::string tok;
    while (in >> tok) {
        if (tok.front() == '#') {
            std::string rest;
            std::getline(in, rest);
            continue;
        }
        return tok;
    }
    throw ConfigError(source, 0, "unexpected end of image data");
}

std::size_t parse_count(const std::string &tok, const std::string &source) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ConfigError(source, 0, fmt::format("bad image token '{}'", tok));
    return v;
}

struct Confusion {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

    void add(bool truth, bool guess) {
        if (truth)
            (guess ? tp : fn)++;
        else
            (guess ? fp : tn)++;
    }
    void fill(AttackResult &r) const {
        const double total = static_cast<double>(tp + tn + fp + fn);
        r.accuracy = total > 0 ? static_cast<double>(tp + tn) / total : 0.0;
        r.false_positive_rate = fp + tn > 0 ? static_cast<double>(fp) / (fp + tn) : 0.0;
        r.false_negative_rate = fn + tp > 0 ? static_cast<double>(fn) / (fn + tp) : 0.0;
    }
};

std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Normalised cross-correlation; two flat vectors count as a perfect match.
double ncc(const std::vector<double> &a, const std::vector<double> &b) {
    double ma = mean_of(a), mb = mean_of(b), sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0)
        return saa <= 0.0 && sbb <= 0.0 ? 1.0 : 0.0;
    return sab / std::sqrt(saa * sbb);
}

std::vector<double> channel_features(const std::vector<double> &x, std::size_t length) {
    const double m = mean_of(x);
    const double sd = std::sqrt(sample_variance(x));
    std::vector<double> out(length, 0.0);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(m))))
        return out;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < length; ++i) {
        const std::size_t lo = i * n / length, hi = (i + 1) * n / length;
        double s = 0.0;
        for (std::size_t k = lo; k < hi; ++k)
            s += (x[k] - m) / sd;
        out[i] = s / static_cast<double>(hi - lo);
    }
    return out;
}

std::vector<double> profile_features(const WebsiteProfile &profile,
                                     const DevicePreset &preset, NoiseModel noise,
                                     std::uint64_t seed, const FingerprintOptions &opts) {
    noise.seed = seed;
    return fingerprint_features(run_burst_profile(preset, profile, opts.duration, noise),
                                opts.resample_length);
}

FingerprintTemplate train_one(const WebsiteProfile &profile, std::size_t index,
                              const DevicePreset &preset, const NoiseModel &noise,
                              const FingerprintOptions &opts) {
    FingerprintTemplate t{profile.label, {}};
    for (std::size_t i = 0; i < opts.traces_per_profile; ++i) {
        const auto f = profile_features(profile, preset, noise,
                                        fingerprint_seed(noise.seed, index, i), opts);
        if (t.features.empty())
            t.features.assign(f.size(), 0.0);
        for (std::size_t k = 0; k < f.size(); ++k)
            t.features[k] += f[k];
    }
    for (double &v : t.features)
        v /= static_cast<double>(opts.traces_per_profile);
    return t;
}

void check_training(const std::vector<WebsiteProfile> &profiles,
                    const FingerprintOptions &opts) {
    if (profiles.size() < 2)
        throw InvalidArgument("fingerprint training needs at least two profiles");
    if (opts.traces_per_profile < 1)
        throw InvalidArgument("traces_per_profile must be >= 1");
}

/// Rank (0-based) of `label` in the classification of one fresh trace.
std::size_t rank_of(const WebsiteProfile &profile, std::size_t index,
                    const std::vector<FingerprintTemplate> &templates,
                    const DevicePreset &preset, const NoiseModel &noise,
                    const FingerprintOptions &opts) {
    NoiseModel n = noise;
    n.seed = fingerprint_seed(noise.seed, index, 1000003);
    const Trace trace = run_burst_profile(preset, profile, opts.duration, n);
    const auto ranked = fingerprint_classify(trace, templates, opts.resample_length);
    const auto it = std::find(ranked.begin(), ranked.end(), profile.label);
    return static_cast<std::size_t>(it - ranked.begin());
}

FingerprintEvaluation summarise(const std::vector<std::size_t> &ranks) {
    FingerprintEvaluation e;
    e.traces = ranks.size();
    for (std::size_t r : ranks) {
        e.top1 += r < 1;
        e.top2 += r < 2;
        e.top5 += r < 5;
    }
    const double n = std::max<double>(1.0, static_cast<double>(ranks.size()));
    e.top1 /= n;
    e.top2 /= n;
    e.top5 /= n;
    return e;
}

struct ChunkOutcome {
    std::vector<PixelColor> guesses;
    double seconds = 0.0;
};

ChunkOutcome attack_chunk(RenderSession session, const CalibrationResult &calib,
                          const TargetImage &target, std::size_t begin, std::size_t end,
                          std::uint64_t seed) {
    session.reseed(seed);
    const double t0 = session.elapsed();
    ChunkOutcome out;
    for (std::size_t i = begin; i < end; ++i)
        out.guesses.push_back(steal_pixel(session, calib, target.pixels[i]));
    out.seconds = session.elapsed() - t0;
    return out;
}

AttackResult steal_image_impl(const DevicePreset &preset, const TargetImage &target,
                              const NoiseModel &noise, const PixelAttackOptions &opts,
                              bool parallel) {
    target.validate();
    if (!target.is_binary())
        throw InvalidArgument("pixel stealing needs a binarised target image");
    if (target.pixels.empty())
        throw InvalidArgument("target image is empty");
    RenderSession session(preset, noise, opts);
    session.warm_up();
    const CalibrationResult calib = calibrate(session);

    const std::size_t n = target.pixels.size();
    const std::size_t chunks = std::clamp<std::size_t>(opts.chunks, 1, n);
    std::vector<ChunkOutcome> outcomes(chunks);
    std::vector<std::exception_ptr> errors(chunks);
    const auto body = [&](std::size_t c) {
        try {
            outcomes[c] = attack_chunk(session, calib, target, c * n / chunks,
                                       (c + 1) * n / chunks, mix(noise.seed + 1 + c));
        } catch (...) {
            errors[c] = std::current_exception();
        }
    };
    const auto nc = static_cast<std::int64_t>(chunks);
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t c = 0; c < nc; ++c)
            body(static_cast<std::size_t>(c));
    } else {
        for (std::int64_t c = 0; c < nc; ++c)
            body(static_cast<std::size_t>(c));
    }
    for (const auto &e : errors)
        if (e)
            std::rethrow_exception(e);

    AttackResult r;
    r.calibration = calib;
    r.recovered_image = TargetImage{target.width, target.height, {}};
    Confusion conf;
    double seconds = 0.0;
    for (const ChunkOutcome &o : outcomes) {
        seconds += o.seconds;
        for (PixelColor g : o.guesses)
            r.recovered_image.pixels.push_back(g);
    }
    for (std::size_t i = 0; i < n; ++i)
        conf.add(target.pixels[i] == PixelColor::white(),
                 r.recovered_image.pixels[i] == PixelColor::white());
    conf.fill(r);
    r.seconds_per_pixel = seconds / static_cast<double>(n);
    return r;
}

std::string trim(std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

} // namespace

void TargetImage::validate() const {
    if (width * height != pixels.size())
        throw InvalidArgument(fmt::format("image is {}x{} but holds {} pixels", width,
                                          height, pixels.size()));
}

bool TargetImage::is_binary() const {
    return std::all_of(pixels.begin(), pixels.end(), [](PixelColor p) {
        return p == PixelColor::black() || p == PixelColor::white();
    });
}

TargetImage read_pnm(std::istream &in, const std::string &source) {
    const std::string magic = next_token(in, source);
    if (magic != "P1" && magic != "P2")
        throw ConfigError(source, 1, fmt::format("unsupported image type '{}'", magic));
    TargetImage img;
    img.width = parse_count(next_token(in, source), source);
    img.height = parse_count(next_token(in, source), source);
    const std::size_t maxval = magic == "P2" ? parse_count(next_token(in, source), source) : 1;
    if (maxval == 0 || maxval > 65535)
        throw ConfigError(source, 0, "grey maxval must lie in [1, 65535]");
    const std::size_t count = img.width * img.height;
    img.pixels.reserve(count);
    while (img.pixels.size() < count) {
        std::string tok = next_token(in, source);
        if (magic == "P1") {
            // Plain PBM allows digits without separators.
            for (char c : tok) {
                if (c != '0' && c != '1')
                    throw ConfigError(source, 0, fmt::format("bad PBM digit '{}'", c));
                if (img.pixels.size() < count)
                    img.pixels.push_back(c == '1' ? PixelColor::black() : PixelColor::white());
            }
        } else {
            const std::size_t v = parse_count(tok, source);
            if (v > maxval)
                throw ConfigError(source, 0, fmt::format("grey level {} above maxval", v));
            const auto g = static_cast<std::uint8_t>(std::lround(255.0 * v / maxval));
            img.pixels.push_back({g, g, g});
        }
    }
    return img;
}

TargetImage load_pnm(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string(), 0, "cannot open image");
    return read_pnm(in, path.string());
}

std::string format_pnm(const TargetImage &image) {
    image.validate();
    const bool binary = image.is_binary();
    std::string out = fmt::format("{}\n{} {}\n", binary ? "P1" : "P2", image.width,
                                  image.height);
    if (!binary)
        out += "255\n";
    for (std::size_t y = 0; y < image.height; ++y) {
        for (std::size_t x = 0; x < image.width; ++x) {
            const PixelColor p = image.at(x, y);
            if (binary)
                out += p == PixelColor::black() ? '1' : '0';
            else
                out += fmt::format("{}{}", x ? " " : "", (p.r + p.g + p.b) / 3);
        }
        out += '\n';
    }
    return out;
}

RenderSession::RenderSession(const DevicePreset &preset, const NoiseModel &noise,
                             const PixelAttackOptions &opts)
    : sim_(preset, noise, opts.clamp), opts_(opts) {
    if (opts_.frames_per_batch < 1)
        throw InvalidArgument("frames_per_batch must be >= 1");
    sim_.reset(resolve_load(preset, build_filter_workload(kGrey, opts_.intensity)));
}

void RenderSession::warm_up() {
    const Load load = resolve_load(sim_.preset(), build_filter_workload(kGrey, opts_.intensity));
    const std::size_t n = sample_count(opts_.warmup, sim_.dt());
    Trace trace{{}, sim_.dt(), sim_.preset().name, "warm-up"};
    trace.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        trace.samples.push_back(sim_.step(load));
    const double tail = std::min(60.0, trace.duration());
    SteadyStateOptions steady;
    steady.window = std::min(steady.window, tail);
    detect_steady_state(trace.slice(trace.duration() - tail - 1e-9, trace.duration() + 1),
                        steady);
}

std::vector<double> RenderSession::measure(PixelColor pixel) {
    const Workload w = build_filter_workload(pixel, opts_.intensity);
    if (opts_.settle_frames > 0)
        render_frames(sim_, w, opts_.settle_frames, opts_.timer);
    return render_frames(sim_, w, opts_.frames_per_batch, opts_.timer);
}

double RenderSession::batch_statistic(const std::vector<double> &frames) const {
    if (!opts_.use_median)
        return mean_of(frames);
    std::vector<double> v = frames;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    if (v.size() % 2 == 1)
        return v[mid];
    const double hi = v[mid];
    return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + mid));
}

void RenderSession::reseed(std::uint64_t seed) { sim_.reseed(seed); }

CalibrationResult calibrate(RenderSession &session) {
    const std::vector<double> black = session.measure(PixelColor::black());
    const std::vector<double> white = session.measure(PixelColor::white());
    CalibrationResult c;
    c.black_mean = session.batch_statistic(black);
    c.white_mean = session.batch_statistic(white);
    c.threshold = 0.5 * (c.black_mean + c.white_mean);
    const double quantisation = session.options().timer.resolution / std::sqrt(12.0);
    const double sd = std::max(
        std::sqrt(0.5 * (sample_variance(black) + sample_variance(white))), quantisation);
    c.margin = (c.white_mean - c.black_mean) / sd;
    if (!(c.margin >= session.options().min_margin))
        throw CalibrationFailedError(fmt::format(
            "white/black frame times differ by {:.3g} s (margin {:.3g} < {:.3g})",
            c.white_mean - c.black_mean, c.margin, session.options().min_margin));
    return c;
}

CalibrationResult calibrate(const DevicePreset &preset, const NoiseModel &noise,
                            const PixelAttackOptions &opts) {
    RenderSession session(preset, noise, opts);
    session.warm_up();
    return calibrate(session);
}

PixelColor steal_pixel(RenderSession &session, const CalibrationResult &calib,
                       PixelColor pixel) {
    const double stat = session.batch_statistic(session.measure(pixel));
    return stat > calib.threshold ? PixelColor::white() : PixelColor::black();
}

AttackResult steal_image(const DevicePreset &preset, const TargetImage &target,
                         const NoiseModel &noise, const PixelAttackOptions &opts) {
    return steal_image_impl(preset, target, noise, opts, true);
}

AttackResult steal_image_serial(const DevicePreset &preset, const TargetImage &target,
                                const NoiseModel &noise, const PixelAttackOptions &opts) {
    return steal_image_impl(preset, target, noise, opts, false);
}

std::vector<Link> read_links_csv(std::istream &in, const std::string &source) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "url,visited")
        throw ConfigError(source, 1, "expected header 'url,visited'");
    std::vector<Link> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty())
            continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos)
            throw ConfigError(source, lineno, "expected 'url,visited'");
        const std::string flag = trim(line.substr(comma + 1));
        if (flag != "0" && flag != "1")
            throw ConfigError(source, lineno,
                              fmt::format("visited must be 0 or 1, got '{}'", flag));
        out.push_back({trim(line.substr(0, comma)), flag == "1"});
    }
    return out;
}

std::vector<Link> load_links_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string(), 0, "cannot open link list");
    return read_links_csv(in, path.string());
}

AttackResult sniff_history(const DevicePreset &preset, const std::vector<Link> &links,
                           const NoiseModel &noise, const PixelAttackOptions &opts) {
    if (links.empty())
        throw InvalidArgument("history sniffing needs at least one link");
    RenderSession session(preset, noise, opts);
    session.warm_up();
    const CalibrationResult calib = calibrate(session);
    const double t0 = session.elapsed();
    AttackResult r;
    r.calibration = calib;
    Confusion conf;
    for (const Link &l : links) {
        const PixelColor shown = l.visited ? PixelColor::white() : PixelColor::black();
        const bool guess = steal_pixel(session, calib, shown) == PixelColor::white();
        r.recovered_links.push_back(guess);
        conf.add(l.visited, guess);
    }
    conf.fill(r);
    r.seconds_per_pixel = (session.elapsed() - t0) / static_cast<double>(links.size());
    return r;
}

std::vector<double> fingerprint_features(const Trace &trace, std::size_t length) {
    if (length < 1 || trace.size() < length)
        throw InvalidArgument(fmt::format("cannot resample {} samples to {} points",
                                          trace.size(), length));
    std::vector<double> out = channel_features(trace.frequencies(), length);
    const std::vector<double> p = channel_features(trace.powers(), length);
    out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::uint64_t fingerprint_seed(std::uint64_t base, std::size_t profile, std::size_t i) {
    return mix(mix(base ^ 0x5157E5ull) ^ (static_cast<std::uint64_t>(profile) << 24) ^ i);
}

std::vector<FingerprintTemplate> fingerprint_train(const std::vector<WebsiteProfile> &profiles,
                                                   const DevicePreset &preset,
                                                   const NoiseModel &noise,
                                                   const FingerprintOptions &opts) {
    check_training(profiles, opts);
    std::vector<FingerprintTemplate> out(profiles.size());
    std::vector<std::exception_ptr> errors(profiles.size());
    const auto n = static_cast<std::int64_t>(profiles.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            out[i] = train_one(profiles[i], static_cast<std::size_t>(i), preset, noise, opts);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

std::vector<FingerprintTemplate>
fingerprint_train_serial(const std::vector<WebsiteProfile> &profiles,
                         const DevicePreset &preset, const NoiseModel &noise,
                         const FingerprintOptions &opts) {
    check_training(profiles, opts);
    std::vector<FingerprintTemplate> out;
    for (std::size_t i = 0; i < profiles.size(); ++i)
        out.push_back(train_one(profiles[i], i, preset, noise, opts));
    return out;
}

std::vector<std::string> fingerprint_classify(const Trace &trace,
                                              const std::vector<FingerprintTemplate> &templates,
                                              std::size_t resample_length) {
    const std::vector<double> f = fingerprint_features(trace, resample_length);
    std::vector<std::pair<double, std::size_t>> scores;
    for (std::size_t i = 0; i < templates.size(); ++i) {
        if (templates[i].features.size() != f.size())
            throw InvalidArgument(fmt::format(
                "template '{}' has {} features, trace has {}", templates[i].label,
                templates[i].features.size(), f.size()));
        scores.emplace_back(ncc(f, templates[i].features), i);
    }
    std::stable_sort(scores.begin(), scores.end(),
                     [](const auto &a, const auto &b) { return a.first > b.first; });
    std::vector<std::string> out;
    for (const auto &[score, i] : scores)
        out.push_back(templates[i].label);
    return out;
}

FingerprintEvaluation fingerprint_evaluate(const std::vector<WebsiteProfile> &profiles,
                                           const std::vector<FingerprintTemplate> &templates,
                                           const DevicePreset &test_preset,
                                           const NoiseModel &noise,
                                           const FingerprintOptions &opts) {
    std::vector<std::size_t> ranks(profiles.size());
    std::vector<std::exception_ptr> errors(profiles.size());
    const auto n = static_cast<std::int64_t>(profiles.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            ranks[i] = rank_of(profiles[i], static_cast<std::size_t>(i), templates,
                               test_preset, noise, opts);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    return summarise(ranks);
}

FingerprintEvaluation
fingerprint_evaluate_serial(const std::vector<WebsiteProfile> &profiles,
                            const std::vector<FingerprintTemplate> &templates,
                            const DevicePreset &test_preset, const NoiseModel &noise,
                            const FingerprintOptions &opts) {
    std::vector<std::size_t> ranks;
    for (std::size_t i = 0; i < profiles.size(); ++i)
        ranks.push_back(rank_of(profiles[i], i, templates, test_preset, noise, opts));
    return summarise(ranks);
}

std::vector<WebsiteProfile> generate_website_catalog(std::uint64_t seed, std::size_t count,
                                                     double span) {
    if (!(span > 1.0))
        throw InvalidArgument("catalog span must exceed 1 s");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> nbursts(3, 12);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto cents = [](double v) { return std::round(v * 100.0) / 100.0; };
    std::vector<WebsiteProfile> out;
    for (std::size_t p = 0; p < count; ++p) {
        WebsiteProfile prof{fmt::format("site-{:03}", p), {}};
        const int nb = nbursts(rng);
        for (int b = 0; b < nb; ++b) {
            const double onset = cents(unit(rng) * (span - 0.5));
            const double max_len = std::min(2.5, span - onset);
            const double len = cents(0.2 + unit(rng) * (max_len - 0.2));
            const double intensity = cents(0.2 + 0.8 * unit(rng));
            prof.bursts.push_back({onset, len, intensity});
        }
        std::sort(prof.bursts.begin(), prof.bursts.end(),
                  [](const Burst &a, const Burst &b) { return a.onset < b.onset; });
        out.push_back(std::move(prof));
    }
    return out;
}

std::vector<WebsiteProfile> profiles_from_config(const KvConfig &cfg) {
    std::vector<WebsiteProfile> out;
    for (const KvSection &s : cfg.sections()) {
        if (s.name() != "profile")
            throw ConfigError(cfg.source(), s.line(),
                              fmt::format("unexpected section [{}]", s.name()));
        s.reject_unknown({"label", "bursts"});
        WebsiteProfile p{s.get_string("label"), {}};
        std::stringstream ss(s.get_string("bursts", ""));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty())
                continue;
            double v[3];
            std::stringstream parts(item);
            std::string part;
            int k = 0;
            while (std::getline(parts, part, ':')) {
                char *end = nullptr;
                if (k < 3)
                    v[k] = std::strtod(part.c_str(), &end);
                if (k >= 3 || end == part.c_str() || *end != '\0')
                    throw ConfigError(cfg.source(), s.line_of("bursts"),
                                      fmt::format("bad burst '{}'", item));
                ++k;
            }
            if (k != 3)
                throw ConfigError(cfg.source(), s.line_of("bursts"),
                                  fmt::format("burst '{}' needs onset:duration:intensity", item));
            p.bursts.push_back({v[0], v[1], v[2]});
        }
        try {
            p.validate();
        } catch (const InvalidArgument &e) {
            throw ConfigError(cfg.source(), s.line(), e.what());
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::string format_profiles(const std::vector<WebsiteProfile> &profiles) {
    std::string out;
    for (const WebsiteProfile &p : profiles) {
        out += fmt::format("[profile]\nlabel = {}\nbursts = ", p.label);
        for (std::size_t i = 0; i < p.bursts.size(); ++i)
            out += fmt::format("{}{}:{}:{}", i ? ", " : "", p.bursts[i].onset,
                               p.bursts[i].duration, p.bursts[i].intensity);
        out += "\n\n";
    }
    return out;
}

} // namespace dvfsleak
