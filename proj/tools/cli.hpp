#pragma once

#include <cstddef>
#include <string>

namespace folab::cli {

struct Options {
    std::string config_path;
    std::string out_path; // empty: stdout (file commands require it)
    std::size_t threads = 0;
};

// exit codes: 0 success, 1 config error, 2 numeric failure, 3 selftest failure
int cmd_rho(const Options& opt);
int cmd_deviation(const Options& opt);
int cmd_gamma(const Options& opt);
int cmd_semiconj(const Options& opt);
int cmd_scan_eps(const Options& opt);
int cmd_qc_build(const Options& opt);
int cmd_qc_freq(const Options& opt);
int cmd_selftest();

} // namespace folab::cli
