#include "deadneuron/io.hpp"

#include "deadneuron/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace deadneuron {

namespace {

using json = nlohmann::ordered_json;

std::string fmt_g(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

json parse_or_throw(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ParseError(std::string(what) + ": malformed JSON");
  return j;
}

const json& field(const json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string(what) + ": missing field \"" + key + "\"");
  return *it;
}

double number_or_throw(const json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string(what) + ": expected a number");
  return j.get<double>();
}

Vecd vector_or_throw(const json& j, Index want, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
  if (want >= 0 && static_cast<Index>(j.size()) != want)
    throw ParseError(std::string(what) + ": wrong length");
  Vecd v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i)
    v(i) = number_or_throw(j[static_cast<size_t>(i)], what);
  return v;
}

json vector_to_json(const Vecd& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json matrix_to_json(const Matd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json report_to_json(const EstimateReport& r) {
  json row;
  row["n0"] = r.n0;
  row["n1"] = r.n1;
  row["mode"] = r.mode;
  row["samples"] = r.samples;
  row["hits"] = r.hits;
  row["marginal_discards"] = r.marginal_discards;
  row["p_hat"] = r.p_hat;
  row["ci_low"] = r.ci_low;
  row["ci_high"] = r.ci_high;
  if (r.theory)
    row["theory"] = *r.theory;
  else
    row["theory"] = nullptr;
  row["seed"] = r.seed;
  return row;
}

}  // namespace

std::string to_json(const CoorientedArrangement<double>& arr) {
  json j;
  j["dim"] = arr.dim;
  json planes = json::array();
  for (const auto& h : arr.hyperplanes) {
    json p;
    p["normal"] = vector_to_json(h.normal);
    p["offset"] = h.offset;
    planes.push_back(std::move(p));
  }
  j["hyperplanes"] = std::move(planes);
  return j.dump();
}

CoorientedArrangement<double> arrangement_from_json(const std::string& text) {
  const char* what = "arrangement";
  json j = parse_or_throw(text, what);
  if (!j.is_object()) throw ParseError(std::string(what) + ": expected an object");
  const json& dim = field(j, "dim", what);
  if (!dim.is_number_integer() || dim.get<long long>() < 1)
    throw ParseError(std::string(what) + ": \"dim\" must be a positive integer");
  CoorientedArrangement<double> arr;
  arr.dim = static_cast<Index>(dim.get<long long>());
  const json& planes = field(j, "hyperplanes", what);
  if (!planes.is_array()) throw ParseError(std::string(what) + ": \"hyperplanes\" must be an array");
  for (const auto& p : planes) {
    if (!p.is_object()) throw ParseError(std::string(what) + ": hyperplane must be an object");
    Hyperplane<double> h;
    h.normal = vector_or_throw(field(p, "normal", what), arr.dim, what);
    h.offset = number_or_throw(field(p, "offset", what), what);
    arr.hyperplanes.push_back(std::move(h));
  }
  return arr;
}

std::string to_json(const NetworkParams& params) {
  json j;
  json arch = json::array();
  for (Index s : params.arch.sizes) arch.push_back(s);
  j["arch"] = std::move(arch);
  json layers = json::array();
  for (const auto& l : params.layers) {
    json layer;
    layer["W"] = matrix_to_json(l.W);
    layer["b"] = vector_to_json(l.b);
    layers.push_back(std::move(layer));
  }
  j["layers"] = std::move(layers);
  return j.dump();
}

NetworkParams params_from_json(const std::string& text) {
  const char* what = "parameters";
  json j = parse_or_throw(text, what);
  if (!j.is_object()) throw ParseError(std::string(what) + ": expected an object");
  const json& arch = field(j, "arch", what);
  if (!arch.is_array() || arch.size() < 3)
    throw ParseError(std::string(what) + ": \"arch\" must list at least three layer sizes");
  NetworkParams params;
  for (const auto& s : arch) {
    if (!s.is_number_integer() || s.get<long long>() < 1)
      throw ParseError(std::string(what) + ": layer sizes must be positive integers");
    params.arch.sizes.push_back(static_cast<Index>(s.get<long long>()));
  }
  const json& layers = field(j, "layers", what);
  if (!layers.is_array() || static_cast<Index>(layers.size()) != params.arch.depth())
    throw ParseError(std::string(what) + ": need one layer per architecture step");
  for (Index l = 0; l < params.arch.depth(); ++l) {
    const json& layer = layers[static_cast<size_t>(l)];
    if (!layer.is_object()) throw ParseError(std::string(what) + ": layer must be an object");
    const Index rows = params.arch.sizes[static_cast<size_t>(l) + 1];
    const Index cols = params.arch.sizes[static_cast<size_t>(l)];
    const json& w = field(layer, "W", what);
    if (!w.is_array() || static_cast<Index>(w.size()) != rows)
      throw ParseError(std::string(what) + ": \"W\" row count must match the architecture");
    AffineMap map;
    map.W.resize(rows, cols);
    for (Index r = 0; r < rows; ++r)
      map.W.row(r) = vector_or_throw(w[static_cast<size_t>(r)], cols, what).transpose();
    map.b = vector_or_throw(field(layer, "b", what), rows, what);
    params.layers.push_back(std::move(map));
  }
  return params;
}

std::string to_json(const StabilityVerdict& verdict) {
  json j;
  j["stable"] = verdict.stable;
  j["marginal"] = verdict.marginal;
  if (std::isfinite(verdict.margin))
    j["margin"] = verdict.margin;
  else
    j["margin"] = nullptr;
  j["regions_checked"] = verdict.regions_checked;
  j["unbounded_regions"] = verdict.unbounded_regions;
  return j.dump();
}

std::string to_csv(const std::vector<EstimateReport>& rows) {
  std::string out = "n0,n1,mode,samples,hits,marginal_discards,p_hat,ci_low,ci_high,theory,seed\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n0) + ',' + std::to_string(r.n1) + ',' + r.mode + ',';
    out += std::to_string(r.samples) + ',' + std::to_string(r.hits) + ',';
    out += std::to_string(r.marginal_discards) + ',';
    out += fmt_g(r.p_hat, 10) + ',' + fmt_g(r.ci_low, 10) + ',' + fmt_g(r.ci_high, 10) + ',';
    if (r.theory) out += fmt_g(*r.theory, 10);
    out += ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

std::string to_json(const std::vector<EstimateReport>& rows) {
  json arr = json::array();
  for (const auto& r : rows) arr.push_back(report_to_json(r));
  return arr.dump();
}

std::string sweep_svg(const std::vector<EstimateReport>& cells) {
  if (cells.empty()) throw UsageError("sweep_svg: no cells");
  const int n0 = cells[0].n0;
  for (const auto& c : cells)
    if (c.n0 != n0) throw UsageError("sweep_svg: cells must share n0");

  const double width = 640, height = 400;
  const double left = 70, right = 20, top = 20, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;

  const double reference = sweep_reference(n0);
  int gap_lo = cells[0].n1 - n0, gap_hi = cells[0].n1 - n0;
  double y_max = reference;
  for (const auto& c : cells) {
    gap_lo = std::min(gap_lo, c.n1 - n0);
    gap_hi = std::max(gap_hi, c.n1 - n0);
    y_max = std::max(y_max, c.ci_high);
  }
  y_max *= 1.1;
  const double gap_span = std::max(1, gap_hi - gap_lo);

  auto px = [&](double gap) { return left + (gap - gap_lo) / gap_span * plot_w; };
  auto py = [&](double p) { return top + plot_h - p / y_max * plot_h; };
  auto num = [](double v) { return fmt_g(v, 6); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
       num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes.
  s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" +
       num(left + plot_w) + "\" y2=\"" + num(top + plot_h) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" +
       num(top + plot_h) + "\" stroke=\"black\"/>\n";
  for (int g = gap_lo; g <= gap_hi; ++g) {
    const double x = px(g);
    s += "<line x1=\"" + num(x) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" + num(x) +
         "\" y2=\"" + num(top + plot_h + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(x) + "\" y=\"" + num(top + plot_h + 20) +
         "\" font-size=\"12\" text-anchor=\"middle\">" + std::to_string(g) + "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double p = y_max * k / 4.0;
    const double y = py(p);
    s += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left) +
         "\" y2=\"" + num(y) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(left - 9) + "\" y=\"" + num(y + 4) +
         "\" font-size=\"12\" text-anchor=\"end\">" + fmt_g(p, 3) + "</text>\n";
  }
  s += "<text x=\"" + num(left + plot_w / 2) + "\" y=\"" + num(height - 12) +
       "\" font-size=\"13\" text-anchor=\"middle\">n1 - n0</text>\n";
  s += "<text x=\"16\" y=\"" + num(top + plot_h / 2) +
       "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       num(top + plot_h / 2) + ")\">estimated probability</text>\n";

  // Dashed reference level 1/4^{n0+1}.
  const double ry = py(reference);
  s += "<line x1=\"" + num(left) + "\" y1=\"" + num(ry) + "\" x2=\"" + num(left + plot_w) +
       "\" y2=\"" + num(ry) + "\" stroke=\"black\" stroke-dasharray=\"6 4\"/>\n";
  s += "<text x=\"" + num(left + plot_w - 4) + "\" y=\"" + num(ry - 6) +
       "\" font-size=\"12\" text-anchor=\"end\">reference " + fmt_g(reference, 6) + "</text>\n";

  // Confidence bars, then the estimate polyline with point markers.
  for (const auto& c : cells) {
    const double x = px(c.n1 - n0);
    s += "<line x1=\"" + num(x) + "\" y1=\"" + num(py(c.ci_low)) + "\" x2=\"" + num(x) +
         "\" y2=\"" + num(py(c.ci_high)) + "\" stroke=\"steelblue\"/>\n";
  }
  s += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ' ';
    s += num(px(cells[i].n1 - n0)) + "," + num(py(cells[i].p_hat));
  }
  s += "\"/>\n";
  for (const auto& c : cells) {
    s += "<circle cx=\"" + num(px(c.n1 - n0)) + "\" cy=\"" + num(py(c.p_hat)) +
         "\" r=\"3\" fill=\"steelblue\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace deadneuron
