#pragma once

#include <stdexcept>
#include <string>

namespace ssp {

// Every failure the library raises carries one of these codes so callers
// (notably the CLI) can map it onto a coarse category without string
// matching.
enum class errc {
  // validation: the caller handed us something structurally wrong
  malformed_header,
  non_finite_value,
  empty_matrix,
  duplicate_index,
  index_out_of_range,
  dimension_mismatch,
  invalid_argument,
  infeasible_rank,
  combinatorial_guard,
  // i/o: the filesystem let us down
  io_failure,
  // numerical: input was well-formed but the math degenerated
  degenerate_after_centering,
  degenerate_interpolant,
  singular_matrix,
  zero_column,
};

enum class error_class { validation, io, numerical };

constexpr error_class classify(errc code) {
  switch (code) {
    case errc::io_failure:
      return error_class::io;
    case errc::degenerate_after_centering:
    case errc::degenerate_interpolant:
    case errc::singular_matrix:
    case errc::zero_column:
      return error_class::numerical;
    default:
      return error_class::validation;
  }
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}

  errc code() const { return code_; }
  error_class category() const { return classify(code_); }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace ssp
