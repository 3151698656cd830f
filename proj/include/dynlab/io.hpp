#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dynlab/chain.hpp"
#include "dynlab/hilbert.hpp"

namespace dynlab {

/// Malformed input file; `what()` reads "<source>:<line>: <message>".
class ParseError : public InvalidInput {
public:
    ParseError(const std::string& source, int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

/// Chain spec document (YAML):
///   states: 3
///   q: [1, 1, 1]
///   pi: [[0, 1, 0], [0, 0, 1], [0, 0, 0]]
///   mu: [1, 0, 0]
ChainSpec parse_chain_spec(std::string_view text, const std::string& source = "<input>");
ChainSpec load_chain_spec(const std::filesystem::path& path);

/// Circle drift model:
///   epsilon: 1.0
///   b_hat: [[1, 0.5, 0], [-1, 0.5, 0]]   # [k, re, im]
CircleDriftModel parse_circle_model(std::string_view text, const std::string& source = "<input>");
CircleDriftModel load_circle_model(const std::filesystem::path& path);

/// Levy model, coefficients for k = 1..K:
///   a: [1, 4, 9]
///   b: [1, 2, 3]
LevyModel parse_levy_model(std::string_view text, const std::string& source = "<input>");
LevyModel load_levy_model(const std::filesystem::path& path);

}  // namespace dynlab
