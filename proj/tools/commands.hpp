#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "document.hpp"

namespace fzcli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsage = 2;
inline constexpr int kNonConvergence = 3;

struct Common {
    std::string set;  // path to a spec file, or an inline spec
    std::string format = "text";
    std::string output;     // empty: stdout
    std::string delta;  // number or expression; empty: family default
    std::uint64_t seed = 0;
};

struct TubeArgs {
    double t_min = 1e-6;
    double t_max = 1e-1;
    int samples = 11;
    std::string method = "auto";  // auto, sliced, gap-formula
    int monte_carlo = 0;          // points per t; 0 disables
};

struct ZetaArgs {
    std::string re;         // a:b:n; empty: D+0.1 .. D+0.5 in 5 steps
    std::string im = "0:0:1";
    std::string kind = "distance";  // distance, tube
    std::string method = "numeric"; // numeric, direct, closed-form
};

struct DimsArgs {
    double im_max = 30.0;
};

struct CheckArgs {
    std::string suite;
    std::string moduli;  // quasi suite without a union set
    std::string D;
};

struct QuasiArgs {
    std::string action;  // build, spectrum, recover
    std::string D;
    std::string moduli;
    int samples = 2048;
    double span_factor = 5.0;
    std::string window = "hann";
    double f_max = 0.0;  // 0: ten times the highest fundamental
};

// Each returns a process exit code and writes its document.
int cmd_set(const Common& c);
int cmd_tube(const Common& c, const TubeArgs& a);
int cmd_tube_export(const Common& c, const TubeArgs& a);
int cmd_zeta(const Common& c, const ZetaArgs& a);
int cmd_dims(const Common& c, const DimsArgs& a);
int cmd_check(const Common& c, const CheckArgs& a);
int cmd_quasi(const Common& c, const QuasiArgs& a);
int cmd_report(const Common& c);

}  // namespace fzcli
