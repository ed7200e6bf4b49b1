#pragma once

#include "kta/errors.hpp"
#include "kta/kpca.hpp"
#include "kta/layer_trainer.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

namespace kta {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Writes through a temporary in the same directory, then renames over the
// destination, so readers never observe a partial file.
inline void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw io_error("cannot open '" + tmp + "' for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out)
            throw io_error("failed writing '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw io_error("cannot rename '" + tmp + "' to '" + path + "': " + std::strerror(errno));
}

inline std::string trace_csv(const TrainTrace& trace) {
    std::string out = "iter,cost\n";
    for (std::size_t i = 0; i < trace.costs.size(); ++i)
        out += std::to_string(i) + "," + format_double(trace.costs[i]) + "\n";
    return out;
}

inline std::string error_curve_csv(const ErrorCurve& curve) {
    std::string out = "layer,d,train_err,test_err\n";
    for (std::size_t i = 0; i < curve.ds.size(); ++i)
        out += std::to_string(curve.layer_index) + "," + std::to_string(curve.ds[i]) + "," +
               format_double(curve.train_err[i]) + "," + format_double(curve.test_err[i]) + "\n";
    return out;
}

}  // namespace kta
