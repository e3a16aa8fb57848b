#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "pfopt/problems.hpp"

namespace pfopt {
namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        const auto r = m.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    Matrix m;
    m.rows = j.size();
    m.cols = m.rows ? j.at(0).size() : 0;
    m.data.reserve(m.rows * m.cols);
    for (const auto& row : j) {
        if (row.size() != m.cols) throw std::invalid_argument("problem JSON: ragged matrix");
        for (const auto& e : row) m.data.push_back(e.get<double>());
    }
    return m;
}

}  // namespace

std::string problem_to_json(const Problem& p) {
    json j;
    j["kind"] = std::string(to_string(p.kind));
    j["dim"] = p.dim;
    j["l2_reg"] = p.l2_reg;
    switch (p.kind) {
        case ProblemKind::quadratic:
            j["A"] = matrix_to_json(p.A);
            j["b"] = p.b;
            break;
        case ProblemKind::tiny_mlp:
            j["hidden"] = p.hidden;
            [[fallthrough]];
        case ProblemKind::least_squares:
        case ProblemKind::logistic:
            j["X"] = matrix_to_json(p.X);
            j["y"] = p.y;
            break;
        case ProblemKind::abs_sum:
            break;
    }
    return j.dump(1);
}

Problem problem_from_json(std::string_view text) {
    const json j = json::parse(text);
    Problem p;
    p.kind = parse_problem_kind(j.at("kind").get<std::string>());
    p.dim = j.at("dim").get<std::size_t>();
    p.l2_reg = j.value("l2_reg", 0.0);
    if (j.contains("A")) p.A = matrix_from_json(j.at("A"));
    if (j.contains("b")) p.b = j.at("b").get<std::vector<double>>();
    if (j.contains("X")) p.X = matrix_from_json(j.at("X"));
    if (j.contains("y")) p.y = j.at("y").get<std::vector<double>>();
    if (j.contains("hidden")) p.hidden = j.at("hidden").get<std::size_t>();
    validate(p);
    return p;
}

void save_problem(const Problem& p, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << problem_to_json(p) << '\n';
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

Problem load_problem(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open problem file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return problem_from_json(buf.str());
}

}  // namespace pfopt
