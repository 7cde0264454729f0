#pragma once

#include <stdexcept>
#include <string>

namespace mardl {

// Every failure the library reports carries one of these kinds so callers
// (tests, the CLI exit-code mapping) can react without parsing messages.
enum class errc {
    duplicate_attribute,
    empty_nodeset,
    index_out_of_range,
    cluster_index_out_of_range,
    zero_total_count,
    missing_block,
    too_many_attributes,
    empty_dataset,
    too_few_points,
    ragged_row,
    missing_value,
    duplicate_header,
    bad_cluster_label,
    version_mismatch,
    malformed_document,
    invalid_config,
    invalid_argument,
    invalid_point,
    invalid_clustering,
    io_error,
};

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace mardl
