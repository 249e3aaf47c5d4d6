#include "wdro/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wdro::io {

namespace {

template <class T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("missing JSON field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad JSON field '") + key + "': " + e.what());
  }
}

std::pair<double, double> support_from_json(const json& j) {
  const auto s = field<std::vector<double>>(j, "support");
  if (s.size() != 2) throw std::invalid_argument("'support' must hold two numbers");
  return {s[0], s[1]};
}

}  // namespace

json to_json(const DiscreteDistribution1D& d) {
  return {{"atoms", std::vector<double>(d.atoms().begin(), d.atoms().end())},
          {"masses", std::vector<double>(d.masses().begin(), d.masses().end())}};
}

DiscreteDistribution1D distribution_from_json(const json& j) {
  return {field<std::vector<double>>(j, "atoms"), field<std::vector<double>>(j, "masses")};
}

json to_json(const WeightVector& w, double p) {
  return {{"T", w.size()},
          {"p", p},
          {"w", std::vector<double>(w.values().begin(), w.values().end())},
          {"N_eff", effective_sample_size(w)},
          {"D_p", weighted_drift(w, p)}};
}

WeightVector weights_from_json(const json& j) { return WeightVector(field<std::vector<double>>(j, "w")); }

PiecewiseAffineLoss loss_from_json(const json& j) {
  if (j.is_object() && j.contains("newsvendor")) {
    const json& nv = j.at("newsvendor");
    return PiecewiseAffineLoss::newsvendor(field<double>(nv, "x"), field<double>(nv, "c_u"), field<double>(nv, "c_o"));
  }
  std::vector<AffinePiece> pieces;
  for (const auto& pair : field<std::vector<std::vector<double>>>(j, "pieces")) {
    if (pair.size() != 2) throw std::invalid_argument("each loss piece must be [slope, intercept]");
    pieces.push_back({pair[0], pair[1]});
  }
  return PiecewiseAffineLoss(std::move(pieces));
}

json to_json(const PiecewiseAffineLoss& loss) {
  json pieces = json::array();
  for (const AffinePiece& p : loss.pieces()) pieces.push_back({p.slope, p.intercept});
  return {{"pieces", pieces}};
}

AmbiguitySpec spec_from_json(const json& j) {
  const auto kind = field<std::string>(j, "kind");
  const auto [lo, hi] = support_from_json(j);
  if (kind == "weighted-ball") {
    WeightedBall ball{distribution_from_json(field<json>(j, "center")), field<double>(j, "eps"), field<double>(j, "p"), lo,
                      hi};
    ball.validate();
    return ball;
  }
  if (kind == "intersection") {
    IntersectionSet set{field<std::vector<double>>(j, "points"), field<std::vector<double>>(j, "radii"),
                        field<double>(j, "p"), lo, hi};
    set.validate();
    return set;
  }
  throw std::invalid_argument("unknown ambiguity-set kind '" + kind + "'");
}

json to_json(const AmbiguitySpec& spec) {
  if (const auto* ball = std::get_if<WeightedBall>(&spec)) {
    return {{"kind", "weighted-ball"},
            {"center", to_json(ball->center)},
            {"eps", ball->eps},
            {"p", ball->p},
            {"support", {ball->lo, ball->hi}}};
  }
  const auto& set = std::get<IntersectionSet>(spec);
  return {{"kind", "intersection"},
          {"points", set.points},
          {"radii", set.radii},
          {"p", set.p},
          {"support", {set.lo, set.hi}}};
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace wdro::io
