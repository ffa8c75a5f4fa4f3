#include "qinst/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qinst {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      entries.push_back({m(i, j).real(), m(i, j).imag()});
  return {{"dim", m.rows()}, {"entries", entries}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries"))
    throw std::invalid_argument("matrix JSON requires 'dim' and 'entries'");
  const int d = j.at("dim").get<int>();
  if (d < 1) throw std::invalid_argument("matrix JSON: dim must be positive");
  const auto& entries = j.at("entries");
  if (!entries.is_array() || entries.size() != static_cast<std::size_t>(d) * d)
    throw std::invalid_argument("matrix JSON: expected dim*dim entries");
  Matrix m(d, d);
  std::size_t idx = 0;
  for (int i = 0; i < d; ++i)
    for (int jj = 0; jj < d; ++jj, ++idx) {
      const auto& e = entries.at(idx);
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("matrix JSON: each entry must be [re, im]");
      m(i, jj) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  return m;
}

nlohmann::json hermitian_to_json(const HermitianMatrix& m) {
  return matrix_to_json(m.matrix());
}

HermitianMatrix hermitian_from_json(const nlohmann::json& j) {
  Matrix m = matrix_from_json(j);
  HermitianMatrix h(m);
  if (h.symmetrization_residual() > 1e-9)
    throw std::invalid_argument("matrix JSON: entries are not Hermitian");
  return h;
}

namespace {

std::string block_key(int a, int x) { return std::to_string(a) + "|" + std::to_string(x); }

}  // namespace

nlohmann::json assemblage_to_json(const Assemblage& s) {
  nlohmann::json blocks = nlohmann::json::object();
  for (int x = 0; x < s.num_inputs(); ++x)
    for (int a = 0; a < s.num_outcomes(); ++a)
      blocks[block_key(a, x)] = hermitian_to_json(s.block(a, x));
  return {{"num_outcomes", s.num_outcomes()},
          {"num_inputs", s.num_inputs()},
          {"dim", s.dim()},
          {"blocks", blocks}};
}

Assemblage assemblage_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("num_outcomes") || !j.contains("num_inputs") ||
      !j.contains("dim") || !j.contains("blocks"))
    throw std::invalid_argument(
        "assemblage JSON requires 'num_outcomes', 'num_inputs', 'dim' and 'blocks'");
  const int num_a = j.at("num_outcomes").get<int>();
  const int num_x = j.at("num_inputs").get<int>();
  const int d = j.at("dim").get<int>();
  if (num_a < 1 || num_x < 1 || d < 1)
    throw std::invalid_argument("assemblage JSON: counts must be positive");
  const auto& blocks = j.at("blocks");
  Assemblage s(num_a, num_x, d);
  for (int x = 0; x < num_x; ++x)
    for (int a = 0; a < num_a; ++a) {
      const std::string key = block_key(a, x);
      if (!blocks.contains(key))
        throw std::invalid_argument("assemblage JSON: missing block '" + key + "'");
      HermitianMatrix h = hermitian_from_json(blocks.at(key));
      if (h.dim() != d)
        throw std::invalid_argument("assemblage JSON: block '" + key + "' has wrong dim");
      s.set_block(a, x, std::move(h));
    }
  return s;
}

nlohmann::json witness_to_json(const Witness& w) {
  nlohmann::json j = assemblage_to_json(w.blocks);
  j["beta"] = w.beta;
  j["scale"] = w.scale;
  return j;
}

Witness witness_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("beta") || !j.contains("scale"))
    throw std::invalid_argument("witness JSON requires 'beta' and 'scale'");
  Witness w(assemblage_from_json(j), j.at("beta").get<double>(), j.at("scale").get<double>());
  if (std::abs(w.scale - w.recomputed_scale()) > 1e-9)
    throw std::invalid_argument("witness JSON: scale does not match the block trace sum");
  return w;
}

nlohmann::json membership_result_to_json(const MembershipResult& r) {
  const int num_a = r.witness.blocks.num_outcomes();
  nlohmann::json decomposition = nlohmann::json::object();
  for (std::size_t i = 0; i < r.decomposition.size(); ++i) {
    const int a = static_cast<int>(i) % num_a;
    const long long lam = static_cast<long long>(i) / num_a;
    decomposition[std::to_string(a) + "|" + std::to_string(lam)] =
        hermitian_to_json(r.decomposition[i]);
  }
  return {{"mu_star", r.mu_star},
          {"mu_dual", r.mu_dual},
          {"gap", r.gap},
          {"in_model", r.in_model},
          {"lambda_weights", r.lambda_weights},
          {"decomposition", decomposition},
          {"witness", witness_to_json(r.witness)},
          {"shift_multipliers", r.shift_multipliers},
          {"primal_status", sdp::to_string(r.primal_status)},
          {"dual_status", sdp::to_string(r.dual_status)},
          {"primal_iterations", r.primal_iterations},
          {"dual_iterations", r.dual_iterations}};
}

nlohmann::json robustness_result_to_json(const RobustnessResult& r) {
  return {{"t_star", r.t_star},
          {"t_dual", r.t_dual},
          {"gap", r.gap},
          {"noise", assemblage_to_json(r.noise)},
          {"target", assemblage_to_json(r.target)},
          {"witness", witness_to_json(r.witness)},
          {"upper_multipliers", r.upper_multipliers},
          {"lower_multipliers", r.lower_multipliers},
          {"primal_status", sdp::to_string(r.primal_status)},
          {"dual_status", sdp::to_string(r.dual_status)},
          {"primal_iterations", r.primal_iterations},
          {"dual_iterations", r.dual_iterations}};
}

nlohmann::json steering_result_to_json(const SteeringResult& r) {
  return {{"lhs_feasible", r.lhs_feasible},
          {"mu_star", r.mu_star},
          {"robustness", r.robustness},
          {"witness", witness_to_json(r.witness)},
          {"gap", r.gap}};
}

std::string format_significant(double value, int digits) {
  if (!std::isfinite(value)) return value > 0 ? "inf" : (value < 0 ? "-inf" : "nan");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
  std::string out = buf;
  for (char& c : out)
    if (c == ',') c = '.';
  return out;
}

nlohmann::json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    std::ostringstream msg;
    msg << origin << ":" << line << ": JSON parse error: " << e.what();
    throw std::runtime_error(msg.str());
  }
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

void save_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace qinst
