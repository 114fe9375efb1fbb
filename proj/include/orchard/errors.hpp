#pragma once

#include <stdexcept>
#include <string>

namespace orchard {

enum class ErrorKind {
    behind_camera,
    out_of_extent,
    nodata_cell,
    elevation_inversion,
    malformed_line,
    header_missing,
    dimension_mismatch,
    malformed_xml,
    unknown_class,
    degenerate_box,
    degenerate_crop,
    insufficient_boxes,
    weight_sum,
    domain_error,
    io_error,
    config_error,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace orchard
