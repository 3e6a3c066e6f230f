#include "diffpad/pipeline.hpp"

#include "diffpad/localizer.hpp"
#include "diffpad/metrics.hpp"
#include "diffpad/sampler.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace diffpad;
using testsupport::make_gallery_image;
using testsupport::random_image;

namespace {

std::vector<ImageTensor> small_gallery(int n, int size) {
    std::vector<ImageTensor> g;
    for (int i = 0; i < n; ++i) g.push_back(make_gallery_image(i, size, size));
    return g;
}

DiffPadConfig fast_config() {
    DiffPadConfig cfg;
    cfg.nfe = 10;
    cfg.seed = 99;
    return cfg;
}

ImageTensor paste(const ImageTensor& clean, const ImageTensor& patch, const PatchBox& box) {
    ImageTensor delta = clean;
    for (int y = 0; y < box.side; ++y)
        for (int x = 0; x < box.side; ++x)
            for (int c = 0; c < clean.channels; ++c)
                delta.at(box.top + y, box.left + x, c) = patch.at(y, x, c);
    return apply_patch(clean, delta, box);
}

}  // namespace

TEST_CASE("apply_patch") {
    Rng rng(77);
    ImageTensor x = random_image(rng, 4, 4, 3);

    SUBCASE("pasting the image onto itself changes nothing") {
        CHECK(apply_patch(x, x, PatchBox{1, 1, 2}) == x);
    }
    SUBCASE("a full-image box returns delta") {
        ImageTensor delta = random_image(rng, 4, 4, 3);
        CHECK(apply_patch(x, delta, PatchBox{0, 0, 4}) == delta);
    }
    SUBCASE("interior box replaces exactly its pixels") {
        ImageTensor delta(4, 4, 3, 200.0);
        ImageTensor out = apply_patch(x, delta, PatchBox{1, 1, 2});
        for (int y = 0; y < 4; ++y)
            for (int xx = 0; xx < 4; ++xx)
                for (int c = 0; c < 3; ++c) {
                    bool in_box = y >= 1 && y <= 2 && xx >= 1 && xx <= 2;
                    CHECK(out.at(y, xx, c) == (in_box ? 200.0 : x.at(y, xx, c)));
                }
    }
    SUBCASE("out-of-bounds box rejected") {
        CHECK_THROWS_AS(apply_patch(x, x, PatchBox{3, 3, 2}), std::invalid_argument);
    }
}

TEST_CASE("make_synthetic_patch") {
    SUBCASE("checker starts dark at the origin") {
        ImageTensor p = make_synthetic_patch(PatchKind::checker, 2, 0);
        CHECK(p.at(0, 0, 0) == 0.0);
        CHECK(p.at(0, 1, 0) == 255.0);
        CHECK(p.at(1, 0, 0) == 255.0);
        CHECK(p.at(1, 1, 0) == 0.0);
    }
    SUBCASE("deterministic for a fixed seed") {
        CHECK(make_synthetic_patch(PatchKind::uniform_noise, 8, 5) ==
              make_synthetic_patch(PatchKind::uniform_noise, 8, 5));
        CHECK(make_synthetic_patch(PatchKind::high_contrast, 8, 5) ==
              make_synthetic_patch(PatchKind::high_contrast, 8, 5));
    }
    SUBCASE("high_contrast spans at least half the range with std >= 64") {
        for (uint64_t seed : {0ULL, 1ULL, 2ULL, 3ULL, 4ULL}) {
            ImageTensor p = make_synthetic_patch(PatchKind::high_contrast, 8, seed);
            double lo = 255.0, hi = 0.0, mean = 0.0;
            for (double v : p.data) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                mean += v;
            }
            mean /= p.size();
            double var = 0.0;
            for (double v : p.data) var += (v - mean) * (v - mean);
            var /= p.size();
            CHECK(hi - lo >= 127.5);
            CHECK(std::sqrt(var) >= 64.0);
        }
    }
}

TEST_CASE("reflective padding and cropping") {
    Rng rng(31);
    ImageTensor x = random_image(rng, 10, 13, 3);

    ImageTensor padded = reflect_pad_to_multiple(x, 4);
    CHECK(padded.height == 12);
    CHECK(padded.width == 16);
    CHECK(crop(padded, 10, 13) == x);

    // mirrored rows: row 10 = row 8, row 11 = row 7
    for (int c = 0; c < 3; ++c) {
        CHECK(padded.at(10, 0, c) == x.at(8, 0, c));
        CHECK(padded.at(11, 0, c) == x.at(7, 0, c));
        CHECK(padded.at(0, 13, c) == x.at(0, 11, c));
    }

    SUBCASE("already divisible is untouched") {
        ImageTensor y = random_image(rng, 8, 8, 1);
        CHECK(reflect_pad_to_multiple(y, 4) == y);
    }
}

TEST_CASE("bicubic_downsample") {
    Rng rng(41);

    SUBCASE("s=1 is the identity") {
        ImageTensor x = random_image(rng, 6, 6, 3);
        CHECK(bicubic_downsample(x, 1) == x);
    }
    SUBCASE("constant image keeps its constant") {
        ImageTensor x(8, 12, 3, 77.0);
        ImageTensor y = bicubic_downsample(x, 2);
        REQUIRE(y.height == 4);
        REQUIRE(y.width == 6);
        for (double v : y.data) CHECK(v == doctest::Approx(77.0).epsilon(1e-9));
    }
    SUBCASE("matches the dense degradation operator on a ramp") {
        ImageTensor x(8, 8, 1);
        for (int y = 0; y < 8; ++y)
            for (int xx = 0; xx < 8; ++xx) x.at(y, xx, 0) = 3.0 * y + 1.5 * xx;
        ImageTensor got = bicubic_downsample(x, 2);

        ConvKernel k = make_bicubic_kernel(2);
        auto A = oracles::degradation_matrix(8, 8, 2, k);
        for (int r = 0; r < 4; ++r)
            for (int q = 0; q < 4; ++q) {
                double want = 0.0;
                const auto& row = A[static_cast<size_t>(r) * 4 + q];
                for (size_t i = 0; i < row.size(); ++i) want += row[i] * x.data[i];
                CHECK(got.at(r, q, 0) == doctest::Approx(want).epsilon(1e-9));
            }
    }
    SUBCASE("non-divisible input pads itself") {
        ImageTensor x = random_image(rng, 10, 10, 3);
        ImageTensor y = bicubic_downsample(x, 4);
        CHECK(y.height == 3);
        CHECK(y.width == 3);
    }
}

TEST_CASE("config JSON round trip and defaults") {
    SUBCASE("shipped defaults match the calibration constants") {
        DiffPadConfig cfg;
        CHECK(cfg.mu == doctest::Approx(0.066));
        CHECK(cfg.nu == doctest::Approx(14.90));
        CHECK(cfg.tau_prime == doctest::Approx(9.0));
        CHECK(cfg.clean_gate == doctest::Approx(62.0));
        CHECK(cfg.nfe == 20);
        CHECK(cfg.sigma == doctest::Approx(0.001));
        CHECK(cfg.scale == 4);
        CHECK(cfg.schedule_T == 1000);
        CHECK(cfg.beta_start == doctest::Approx(1e-4));
        CHECK(cfg.beta_end == doctest::Approx(0.02));
        CHECK(cfg.rho == doctest::Approx(0.5));
    }
    SUBCASE("sections override defaults selectively") {
        nlohmann::json j = {{"schedule", {{"T", 500}, {"beta_end", 0.01}}},
                            {"sampler", {{"nfe", 8}, {"sigma", 0.01}}},
                            {"localizer", {{"mu", 0.1}, {"clean_gate", 40.0}}},
                            {"pipeline", {{"scale", 2}, {"seed", 77}}}};
        DiffPadConfig cfg = config_from_json(j);
        CHECK(cfg.schedule_T == 500);
        CHECK(cfg.beta_end == doctest::Approx(0.01));
        CHECK(cfg.beta_start == doctest::Approx(1e-4));  // untouched
        CHECK(cfg.nfe == 8);
        CHECK(cfg.sigma == doctest::Approx(0.01));
        CHECK(cfg.mu == doctest::Approx(0.1));
        CHECK(cfg.nu == doctest::Approx(14.90));  // untouched
        CHECK(cfg.clean_gate == doctest::Approx(40.0));
        CHECK(cfg.scale == 2);
        CHECK(cfg.seed == 77);
    }
    SUBCASE("invalid values rejected") {
        nlohmann::json j = {{"sampler", {{"sigma", 0.0}}}};
        CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
        nlohmann::json j2 = {{"pipeline", {{"scale", 0}}}};
        CHECK_THROWS_AS(config_from_json(j2), std::invalid_argument);
    }
}

TEST_CASE("defend leaves clean gallery images untouched") {
    int size = 32;
    auto gallery = small_gallery(3, size);
    GalleryDenoiser den(gallery, DiffPadConfig{}.make_schedule());
    DiffPadConfig cfg = fast_config();

    DecontaminationResult r = defend(gallery[1], cfg, den);
    CHECK(r.clean_flag);
    CHECK_FALSE(r.detected.has_value());
    CHECK(r.output == gallery[1]);  // bit-exact
    CHECK(r.diagnostics.restoration_mse < cfg.clean_gate);
}

TEST_CASE("defend finds and repairs a synthetic patch") {
    int size = 32;
    auto gallery = small_gallery(3, size);
    GalleryDenoiser den(gallery, DiffPadConfig{}.make_schedule());
    DiffPadConfig cfg = fast_config();

    PatchBox truth{9, 14, 8};
    ImageTensor patch = make_synthetic_patch(PatchKind::checker, truth.side, 5);
    ImageTensor adv = paste(gallery[0], patch, truth);

    DecontaminationResult r = defend(adv, cfg, den);
    REQUIRE_FALSE(r.clean_flag);
    REQUIRE(r.detected.has_value());
    CHECK(miou(*r.detected, truth) >= 0.5);

    SUBCASE("diagnostics are populated") {
        CHECK(r.diagnostics.restoration_mse >= cfg.clean_gate);
        CHECK(r.diagnostics.tau ==
              doctest::Approx(cfg.mu * r.diagnostics.restoration_mse + cfg.nu));
        CHECK(r.diagnostics.estimated_area > 0);
    }
    SUBCASE("bit-identical rerun") {
        DecontaminationResult r2 = defend(adv, cfg, den);
        CHECK(r2.output == r.output);
        CHECK(r2.clean_flag == r.clean_flag);
        CHECK(r2.detected == r.detected);
        CHECK(r2.diagnostics.restoration_mse == r.diagnostics.restoration_mse);
        CHECK(r2.diagnostics.tau == r.diagnostics.tau);
        CHECK(r2.diagnostics.estimated_area == r.diagnostics.estimated_area);
    }
    SUBCASE("residual is amplified inside the true patch region") {
        ImageTensor x_pad = reflect_pad_to_multiple(adv, cfg.scale);
        RestorationTask task{SuperResolutionTask{cfg.scale, make_bicubic_kernel(cfg.scale)},
                             bicubic_downsample(x_pad, cfg.scale), cfg.sigma};
        ImageTensor x_hat = crop(
            restore(task, den, den.schedule(), cfg.nfe, derive_seed(cfg.seed, 1), cfg.rho),
            size, size);
        ResidualMap res = residual_map(adv, x_hat);
        double inside = 0.0, outside = 0.0;
        int n_in = 0, n_out = 0;
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) {
                bool in_box = y >= truth.top && y < truth.top + truth.side &&
                              x >= truth.left && x < truth.left + truth.side;
                (in_box ? inside : outside) += res.at(y, x);
                (in_box ? n_in : n_out) += 1;
            }
        CHECK(inside / n_in >= 2.0 * (outside / n_out));
    }
    SUBCASE("pixels outside the detected box barely move") {
        const PatchBox& box = *r.detected;
        double worst = 0.0;
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) {
                bool in_box = y >= box.top && y < box.top + box.side && x >= box.left &&
                              x < box.left + box.side;
                if (in_box) continue;
                for (int c = 0; c < 3; ++c)
                    worst = std::max(worst, std::abs(r.output.at(y, x, c) - adv.at(y, x, c)));
            }
        CHECK(worst <= 2.0);
    }
}

TEST_CASE("defend handles dimensions that need padding") {
    int h = 30, w = 34;  // not divisible by 4
    std::vector<ImageTensor> gallery;
    for (int i = 0; i < 3; ++i) gallery.push_back(make_gallery_image(i, h, w));
    GalleryDenoiser den(gallery, DiffPadConfig{}.make_schedule());
    DiffPadConfig cfg = fast_config();

    PatchBox truth{8, 10, 8};
    ImageTensor adv = paste(gallery[2], make_synthetic_patch(PatchKind::high_contrast, 8, 3),
                            truth);
    DecontaminationResult r = defend(adv, cfg, den);
    CHECK(r.output.height == h);
    CHECK(r.output.width == w);
    REQUIRE(r.detected.has_value());
    CHECK(miou(*r.detected, truth) > 0.0);
}

TEST_CASE("diagnostics serialization") {
    DecontaminationResult r;
    r.clean_flag = false;
    r.detected = PatchBox{3, 4, 9};
    r.diagnostics = {123.5, 23.05, 81, 0.0};
    nlohmann::json j = diagnostics_to_json(r);
    CHECK(j["clean_flag"] == false);
    CHECK(j["detected"]["top"] == 3);
    CHECK(j["detected"]["side"] == 9);
    CHECK(j["restoration_mse"] == doctest::Approx(123.5));
    CHECK(j["estimated_area"] == 81);
    CHECK(j["runtime_ms"] == 0.0);  // timing withheld by default

    r.diagnostics.runtime_ms = 55.5;
    CHECK(diagnostics_to_json(r, true)["runtime_ms"] == doctest::Approx(55.5));
    CHECK(diagnostics_to_json(r, false)["runtime_ms"] == 0.0);

    r.clean_flag = true;
    r.detected.reset();
    CHECK(diagnostics_to_json(r)["detected"].is_null());
}
