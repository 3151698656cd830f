#include "dynlab/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <yaml-cpp/yaml.h>

namespace dynlab {

namespace {

int line_of(const YAML::Node& node)
{
    return node.Mark().line + 1;
}

YAML::Node parse_document(std::string_view text, const std::string& source)
{
    try {
        YAML::Node doc = YAML::Load(std::string(text));
        if (!doc.IsMap()) {
            throw ParseError(source, 1, "expected a mapping of fields");
        }
        return doc;
    } catch (const YAML::ParserException& e) {
        throw ParseError(source, e.mark.line + 1, e.msg);
    }
}

YAML::Node require(const YAML::Node& doc, const char* key, const std::string& source)
{
    const YAML::Node node = doc[key];
    if (!node) {
        throw ParseError(source, line_of(doc), fmt::format("missing field `{}`", key));
    }
    return node;
}

double scalar(const YAML::Node& node, const std::string& source, const std::string& what)
{
    if (!node.IsScalar()) {
        throw ParseError(source, line_of(node), fmt::format("{} must be a number", what));
    }
    try {
        return node.as<double>();
    } catch (const YAML::Exception&) {
        throw ParseError(source, line_of(node), fmt::format("{} must be a number, got `{}`", what, node.Scalar()));
    }
}

Vec vector_field(const YAML::Node& node, const std::string& source, const std::string& what,
                 std::ptrdiff_t expected = -1)
{
    if (!node.IsSequence()) {
        throw ParseError(source, line_of(node), fmt::format("`{}` must be a list", what));
    }
    if (expected >= 0 && static_cast<std::ptrdiff_t>(node.size()) != expected) {
        throw ParseError(source, line_of(node),
                         fmt::format("`{}` has {} entries, expected {}", what, node.size(), expected));
    }
    Vec v(static_cast<Eigen::Index>(node.size()));
    for (std::size_t i = 0; i < node.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = scalar(node[i], source, fmt::format("{}[{}]", what, i));
    }
    return v;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

ParseError::ParseError(const std::string& source, int line, const std::string& message)
    : InvalidInput(fmt::format("{}:{}: {}", source, line, message)), line_(line)
{
}

ChainSpec parse_chain_spec(std::string_view text, const std::string& source)
{
    const YAML::Node doc = parse_document(text, source);
    const YAML::Node states = require(doc, "states", source);
    const double count = scalar(states, source, "states");
    if (!(count >= 1) || count != static_cast<int>(count)) {
        throw ParseError(source, line_of(states), "`states` must be a positive integer");
    }
    const int n = static_cast<int>(count);

    ChainSpec spec;
    spec.q = vector_field(require(doc, "q", source), source, "q", n);
    spec.mu = vector_field(require(doc, "mu", source), source, "mu", n);
    const YAML::Node pi = require(doc, "pi", source);
    if (!pi.IsSequence() || static_cast<int>(pi.size()) != n) {
        throw ParseError(source, line_of(pi), fmt::format("`pi` must be a list of {} rows", n));
    }
    spec.pi.resize(n, n);
    for (int x = 0; x < n; ++x) {
        spec.pi.row(x) = vector_field(pi[x], source, fmt::format("pi[{}]", x), n).transpose();
    }
    try {
        validate(spec);
    } catch (const InvalidInput& e) {
        throw ParseError(source, line_of(doc), e.what());
    }
    return spec;
}

ChainSpec load_chain_spec(const std::filesystem::path& path)
{
    return parse_chain_spec(read_file(path), path.string());
}

CircleDriftModel parse_circle_model(std::string_view text, const std::string& source)
{
    const YAML::Node doc = parse_document(text, source);
    CircleDriftModel model;
    model.epsilon = scalar(require(doc, "epsilon", source), source, "epsilon");
    const YAML::Node b_hat = require(doc, "b_hat", source);
    if (!b_hat.IsSequence()) {
        throw ParseError(source, line_of(b_hat), "`b_hat` must be a list of [k, re, im]");
    }
    for (std::size_t i = 0; i < b_hat.size(); ++i) {
        const Vec entry = vector_field(b_hat[i], source, fmt::format("b_hat[{}]", i), 3);
        if (entry(0) != static_cast<int>(entry(0))) {
            throw ParseError(source, line_of(b_hat[i]), "Fourier index must be an integer");
        }
        model.b_hat.push_back({static_cast<int>(entry(0)), Complex(entry(1), entry(2))});
    }
    try {
        model.validate();
    } catch (const InvalidInput& e) {
        throw ParseError(source, line_of(b_hat), e.what());
    }
    return model;
}

CircleDriftModel load_circle_model(const std::filesystem::path& path)
{
    return parse_circle_model(read_file(path), path.string());
}

LevyModel parse_levy_model(std::string_view text, const std::string& source)
{
    const YAML::Node doc = parse_document(text, source);
    const Vec a = vector_field(require(doc, "a", source), source, "a");
    const Vec b = vector_field(require(doc, "b", source), source, "b", a.size());
    LevyModel model{{a.data(), a.data() + a.size()}, {b.data(), b.data() + b.size()}};
    try {
        model.validate();
    } catch (const InvalidInput& e) {
        throw ParseError(source, line_of(doc["a"]), e.what());
    }
    return model;
}

LevyModel load_levy_model(const std::filesystem::path& path)
{
    return parse_levy_model(read_file(path), path.string());
}

}  // namespace dynlab
