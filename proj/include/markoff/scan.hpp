#pragma once

// Raster scanner over complex parameter slices: per pixel, build a seed,
// run the Bowditch test with a small budget, and color by verdict/depth.
// Pixels are independent work items; results land in a preallocated grid by
// index, so output bytes do not depend on the worker count.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "markoff/bowditch.hpp"
#include "markoff/identities.hpp"
#include "markoff/markoff_map.hpp"
#include "markoff/series.hpp"

namespace markoff {

enum class ScanMode { vary_z, vary_mu, vary_xy_diagonal };

inline const char* to_string(ScanMode m) {
    switch (m) {
        case ScanMode::vary_z: return "vary_z";
        case ScanMode::vary_mu: return "vary_mu";
        default: return "vary_xy_diagonal";
    }
}

struct ScanConfig {
    ScanMode mode = ScanMode::vary_z;
    cplx fixed_x{3.0}, fixed_y{3.0}, fixed_z{3.0};  // the non-varying coordinates
    cplx center{3.0};
    double width = 4.0;
    double height = 4.0;
    int res_w = 128;
    int res_h = 128;
    BQConfig bq{24, 2.0 + 1e-9, false, 1e-12, 4000};
    bool compute_sum = false;  // evaluate sum_main on satisfied pixels
    double sum_tol = 1e-6;
    int sum_depth = 24;
};

struct PixelRecord {
    BQStatus status = BQStatus::inconclusive;
    int depth_to_verdict = 0;
    bool has_sum = false;
    cplx sum{};
};

struct ScanResult {
    int width = 0;
    int height = 0;
    std::vector<PixelRecord> records;  // row-major, index iy * width + ix

    const PixelRecord& at(int ix, int iy) const { return records[std::size_t(iy) * width + ix]; }
};

namespace detail {

inline cplx pixel_value(const ScanConfig& cfg, int ix, int iy) {
    double re = cfg.center.real() - cfg.width / 2.0 + (ix + 0.5) * cfg.width / cfg.res_w;
    double im = cfg.center.imag() + cfg.height / 2.0 - (iy + 0.5) * cfg.height / cfg.res_h;
    return {re, im};
}

inline MarkoffMap pixel_map(const ScanConfig& cfg, cplx p) {
    switch (cfg.mode) {
        case ScanMode::vary_z: return MarkoffMap::from_seed(cfg.fixed_x, cfg.fixed_y, p);
        case ScanMode::vary_mu:
            return MarkoffMap::from_seed(cfg.fixed_x, cfg.fixed_y,
                                         z_branch(cfg.fixed_x, cfg.fixed_y, p));
        default: return MarkoffMap::from_seed(p, p, cfg.fixed_z);
    }
}

}  // namespace detail

inline ScanResult run_scan(const ScanConfig& cfg, int workers = 1) {
    if (cfg.res_w <= 0 || cfg.res_h <= 0) throw std::invalid_argument("resolution must be positive");
    if (!(cfg.width > 0.0) || !(cfg.height > 0.0))
        throw std::invalid_argument("scan window must be nondegenerate");
    if (workers < 1) workers = 1;
    if (cfg.mode == ScanMode::vary_mu && (cfg.fixed_x == 0.0 || cfg.fixed_y == 0.0))
        throw std::invalid_argument("vary_mu needs nonzero fixed x, y");

    ScanResult out;
    out.width = cfg.res_w;
    out.height = cfg.res_h;
    out.records.resize(std::size_t(cfg.res_w) * cfg.res_h);

    std::atomic<long> cursor{0};
    const long total = long(cfg.res_w) * cfg.res_h;
    auto work = [&]() {
        for (long i = cursor.fetch_add(1); i < total; i = cursor.fetch_add(1)) {
            int ix = int(i % cfg.res_w);
            int iy = int(i / cfg.res_w);
            PixelRecord rec;
            try {
                MarkoffMap map = detail::pixel_map(cfg, detail::pixel_value(cfg, ix, iy));
                BQReport bq = check_bq(map, cfg.bq);
                rec.status = bq.status;
                rec.depth_to_verdict = bq.max_depth_explored;
                if (cfg.compute_sum && bq.status == BQStatus::satisfied) {
                    SumOptions opts;
                    opts.bq = cfg.bq;
                    opts.precomputed_bq = &bq;
                    SeriesResult s = sum_main(map, cfg.sum_tol, cfg.sum_depth, opts);
                    rec.has_sum = true;
                    rec.sum = s.value;
                }
            } catch (const std::exception&) {
                rec.status = BQStatus::inconclusive;  // degenerate seed at this pixel
                rec.depth_to_verdict = 0;
            }
            out.records[std::size_t(i)] = rec;
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return out;
}

// Grayscale by verdict: satisfied = 255, inconclusive = 160, violated in a
// dark band 16..112 shaded by the depth at which the verdict landed.
inline unsigned char pixel_shade(const PixelRecord& r) {
    switch (r.status) {
        case BQStatus::satisfied: return 255;
        case BQStatus::inconclusive: return 160;
        default: {
            int shade = 16 + r.depth_to_verdict * 8;
            return static_cast<unsigned char>(shade > 112 ? 112 : shade);
        }
    }
}

inline void write_pgm(const ScanResult& res, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << "P5\n" << res.width << " " << res.height << "\n255\n";
    for (const PixelRecord& r : res.records) f.put(static_cast<char>(pixel_shade(r)));
    if (!f) throw std::runtime_error("write failed for " + path);
}

inline std::string scan_csv(const ScanConfig& cfg, const ScanResult& res) {
    std::string out = "ix,iy,re,im,status,depth_to_verdict,sum_re,sum_im\n";
    char buf[160];
    for (int iy = 0; iy < res.height; ++iy) {
        for (int ix = 0; ix < res.width; ++ix) {
            const PixelRecord& r = res.at(ix, iy);
            cplx p = detail::pixel_value(cfg, ix, iy);
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%s,%d", ix, iy, p.real(), p.imag(),
                          to_string(r.status), r.depth_to_verdict);
            out += buf;
            if (r.has_sum) {
                std::snprintf(buf, sizeof buf, ",%.17g,%.17g", r.sum.real(), r.sum.imag());
                out += buf;
            } else {
                out += ",,";
            }
            out += '\n';
        }
    }
    return out;
}

inline void write_csv(const ScanConfig& cfg, const ScanResult& res, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << scan_csv(cfg, res);
    if (!f) throw std::runtime_error("write failed for " + path);
}

}  // namespace markoff
