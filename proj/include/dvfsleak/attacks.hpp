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

#ifndef DVFSLEAK_ATTACKS_HPP
#define DVFSLEAK_ATTACKS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dvfsleak/analysis.hpp"
#include "dvfsleak/kv_config.hpp"
#include "dvfsleak/simulator.hpp"
#include "dvfsleak/workload.hpp"

namespace dvfsleak {

struct TargetImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<PixelColor> pixels; // row-major

    /// Throws InvalidArgument if width * height != pixels.size().
    void validate() const;
    const PixelColor &at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
    /// True when every pixel is pure black or pure white.
    bool is_binary() const;
    bool operator==(const TargetImage &) const = default;
};

/// Plain PBM (P1) and PGM (P2) text formats; P2 grey levels map to
/// grey pixels. Throws ConfigError on malformed input.
TargetImage read_pnm(std::istream &in, const std::string &source);
TargetImage load_pnm(const std::filesystem::path &path);
/// Binary images as P1, anything else as P2 (mean channel level).
std::string format_pnm(const TargetImage &image);

struct CalibrationResult {
    double threshold = 0.0;  // s
    double black_mean = 0.0; // s
    double white_mean = 0.0; // s
    /// (white_mean - black_mean) over the pooled per-frame standard
    /// deviation, floored at the timer's quantisation noise.
    double margin = 0.0;
};

struct PixelAttackOptions {
    std::size_t frames_per_batch = 300;
    /// Frames rendered after switching pixels and before measuring.
    std::size_t settle_frames = 100;
    /// Filter cycles per frame.
    double intensity = 6.0e7;
    FrameTimer timer;
    /// Simulated seconds of rendering before calibration.
    double warmup = 600.0;
    double min_margin = 0.5;
    /// Decide on the batch median instead of the mean.
    bool use_median = false;
    std::optional<std::size_t> clamp;
    /// Independent simulator instances for steal_image; each is cloned
    /// from the calibrated session. 1 keeps the whole image on one device.
    std::size_t chunks = 8;
};

/// One browser tab rendering the filter stack on a simulated device.
class RenderSession {
public:
    RenderSession(const DevicePreset &preset, const NoiseModel &noise,
                  const PixelAttackOptions &opts);

    /// Renders the filter over a mid-grey pixel for `opts.warmup` seconds
    /// and checks the device settled; throws NotConvergedError otherwise.
    void warm_up();
    /// Settles on `pixel`, then returns one batch of frame times.
    std::vector<double> measure(PixelColor pixel);
    /// Batch statistic (mean or median) used for decisions.
    double batch_statistic(const std::vector<double> &frames) const;
    /// Reseeds the session's noise stream (used when cloning).
    void reseed(std::uint64_t seed);

    double elapsed() const { return sim_.state().elapsed; }
    const PixelAttackOptions &options() const noexcept { return opts_; }

private:
    Simulator sim_;
    PixelAttackOptions opts_;
};

/// Black and white calibration batches on a warmed-up session. Throws
/// CalibrationFailedError when white frames are not slower than black ones
/// by at least `min_margin`.
CalibrationResult calibrate(RenderSession &session);
/// Fresh session: warm-up plus calibrate().
CalibrationResult calibrate(const DevicePreset &preset, const NoiseModel &noise,
                            const PixelAttackOptions &opts = {});

/// White iff the batch statistic exceeds the threshold.
PixelColor steal_pixel(RenderSession &session, const CalibrationResult &calib,
                       PixelColor pixel);

struct AttackResult {
    TargetImage recovered_image;
    std::vector<bool> recovered_links; // true = visited
    std::vector<std::string> recovered_labels;
    double accuracy = 0.0;
    double false_positive_rate = 0.0;
    double false_negative_rate = 0.0;
    double seconds_per_pixel = 0.0; // simulated
    std::optional<CalibrationResult> calibration;
};

/// Calibrates once, then classifies every pixel. Pixels are split into
/// `opts.chunks` contiguous runs, each attacked on its own copy of the
/// calibrated session; runs execute in parallel. Throws InvalidArgument
/// for non-binary targets; propagates CalibrationFailedError.
AttackResult steal_image(const DevicePreset &preset, const TargetImage &target,
                         const NoiseModel &noise, const PixelAttackOptions &opts = {});
/// Same chunks, run one after another.
AttackResult steal_image_serial(const DevicePreset &preset, const TargetImage &target,
                                const NoiseModel &noise,
                                const PixelAttackOptions &opts = {});

struct Link {
    std::string url;
    bool visited = false;
};

/// Reads `url,visited` CSV (header required, visited is 0/1).
std::vector<Link> read_links_csv(std::istream &in, const std::string &source);
std::vector<Link> load_links_csv(const std::filesystem::path &path);

/// One pixel per link on a single session: visited links render white.
/// Positive = visited. Throws InvalidArgument for an empty list.
AttackResult sniff_history(const DevicePreset &preset, const std::vector<Link> &links,
                           const NoiseModel &noise, const PixelAttackOptions &opts = {});

struct FingerprintOptions {
    double duration = 15.0;         // s per page load
    std::size_t resample_length = 150;
    std::size_t traces_per_profile = 4;
};

struct FingerprintTemplate {
    std::string label;
    std::vector<double> features;
};

/// Frequency and power channels, each z-normalised and box-averaged to
/// `length` points, concatenated. A constant channel maps to zeros.
/// Throws InvalidArgument if the trace is shorter than `length`.
std::vector<double> fingerprint_features(const Trace &trace, std::size_t length);

/// Noise seed of the i-th training trace of profile `p`.
std::uint64_t fingerprint_seed(std::uint64_t base, std::size_t profile, std::size_t i);

/// Per profile, the pointwise mean of `traces_per_profile` feature
/// vectors. Profiles are processed in parallel. Throws InvalidArgument for
/// fewer than two profiles.
std::vector<FingerprintTemplate> fingerprint_train(const std::vector<WebsiteProfile> &profiles,
                                                   const DevicePreset &preset,
                                                   const NoiseModel &noise,
                                                   const FingerprintOptions &opts = {});
std::vector<FingerprintTemplate>
fingerprint_train_serial(const std::vector<WebsiteProfile> &profiles,
                         const DevicePreset &preset, const NoiseModel &noise,
                         const FingerprintOptions &opts = {});

/// Labels by descending normalised cross-correlation between the trace's
/// features and each template. Throws InvalidArgument on a length
/// mismatch.
std::vector<std::string> fingerprint_classify(const Trace &trace,
                                              const std::vector<FingerprintTemplate> &templates,
                                              std::size_t resample_length = 150);

struct FingerprintEvaluation {
    /// Fraction of test traces whose true label is within the top k,
    /// for k = 1, 2, 5.
    double top1 = 0.0, top2 = 0.0, top5 = 0.0;
    std::size_t traces = 0;
};

/// One fresh trace per profile on `test_preset` (seeds offset from the
/// training seeds), classified against `templates`.
FingerprintEvaluation fingerprint_evaluate(const std::vector<WebsiteProfile> &profiles,
                                           const std::vector<FingerprintTemplate> &templates,
                                           const DevicePreset &test_preset,
                                           const NoiseModel &noise,
                                           const FingerprintOptions &opts = {});
FingerprintEvaluation
fingerprint_evaluate_serial(const std::vector<WebsiteProfile> &profiles,
                            const std::vector<FingerprintTemplate> &templates,
                            const DevicePreset &test_preset, const NoiseModel &noise,
                            const FingerprintOptions &opts = {});

/// Seeded synthetic catalog: `count` profiles labelled site-000...,
/// each with 3 to 12 bursts inside `span` seconds.
std::vector<WebsiteProfile> generate_website_catalog(std::uint64_t seed,
                                                     std::size_t count = 100,
                                                     double span = 15.0);

/// `[profile]` sections with `label` and `bursts = onset:duration:intensity, ...`.
std::vector<WebsiteProfile> profiles_from_config(const KvConfig &cfg);
std::string format_profiles(const std::vector<WebsiteProfile> &profiles);

} // namespace dvfsleak

#endif // DVFSLEAK_ATTACKS_HPP
