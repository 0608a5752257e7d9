// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "tvdmood/tableau.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace tvdmood {

namespace {

constexpr double kRowSumTol = 1e-13;

std::vector<std::vector<double>> zeros(std::size_t s) {
  return std::vector<std::vector<double>>(s, std::vector<double>(s, 0.0));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("ImexTableau: " + what);
}

}  // namespace

bool ImexTableau::trivial_first_stage() const {
  if (s == 0) return false;
  if (a_im[0][0] != 0.0) return false;
  for (std::size_t k = 0; k < s; ++k) {
    if (a_im[k][0] != 0.0) return false;
  }
  return b_im[0] == 0.0 && c_im[0] == 0.0 && c_ex[0] == 0.0;
}

bool ImexTableau::stiffly_accurate() const {
  if (s == 0) return false;
  for (std::size_t j = 0; j < s; ++j) {
    if (b_ex[j] != a_ex[s - 1][j]) return false;
    if (b_im[j] != a_im[s - 1][j]) return false;
  }
  return true;
}

void ImexTableau::validate() const {
  require(s >= 1, "empty tableau");
  require(a_ex.size() == s && a_im.size() == s, "A matrix row count != s");
  require(b_ex.size() == s && b_im.size() == s, "b length != s");
  require(c_ex.size() == s && c_im.size() == s, "c length != s");
  for (std::size_t i = 0; i < s; ++i) {
    require(a_ex[i].size() == s && a_im[i].size() == s, "A matrix column count != s");
    for (std::size_t j = i; j < s; ++j) {
      require(a_ex[i][j] == 0.0, "explicit part not strictly lower triangular");
      if (j > i) require(a_im[i][j] == 0.0, "implicit part not lower triangular");
    }
    double sum_ex = 0.0, sum_im = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      sum_ex += a_ex[i][j];
      sum_im += a_im[i][j];
    }
    require(std::abs(sum_ex - c_ex[i]) <= kRowSumTol, "explicit row sum differs from c_ex");
    require(std::abs(sum_im - c_im[i]) <= kRowSumTol, "implicit row sum differs from c_im");
  }
}

double OrderCheck::max_residual_up_to(int p) const {
  double m = 0.0;
  for (const auto& [cond, r] : residuals) {
    const int cp = cond[0] - '0';
    if (cp <= p) m = std::max(m, std::abs(r));
  }
  return m;
}

OrderCheck order_check(const ImexTableau& t, double tol) {
  const std::size_t s = t.s;
  const std::vector<double>* bs[2] = {&t.b_ex, &t.b_im};
  const std::vector<double>* cs[2] = {&t.c_ex, &t.c_im};
  const std::vector<std::vector<double>>* as[2] = {&t.a_ex, &t.a_im};
  const char* tag[2] = {"ex", "im"};

  OrderCheck out;
  auto add = [&out](int p, const std::string& name, double value, double target) {
    out.residuals.emplace_back(std::to_string(p) + ":" + name, value - target);
  };

  for (int bi = 0; bi < 2; ++bi) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s; ++i) sum += (*bs[bi])[i];
    add(1, std::string("b_") + tag[bi] + "*1", sum, 1.0);
  }
  for (int bi = 0; bi < 2; ++bi) {
    for (int ci = 0; ci < 2; ++ci) {
      double sum = 0.0;
      for (std::size_t i = 0; i < s; ++i) sum += (*bs[bi])[i] * (*cs[ci])[i];
      add(2, std::string("b_") + tag[bi] + "*c_" + tag[ci], sum, 0.5);
    }
  }
  for (int bi = 0; bi < 2; ++bi) {
    for (int c1 = 0; c1 < 2; ++c1) {
      for (int c2 = c1; c2 < 2; ++c2) {
        double sum = 0.0;
        for (std::size_t i = 0; i < s; ++i)
          sum += (*bs[bi])[i] * (*cs[c1])[i] * (*cs[c2])[i];
        add(3, std::string("b_") + tag[bi] + "*c_" + tag[c1] + "c_" + tag[c2], sum,
            1.0 / 3.0);
      }
    }
    for (int ai = 0; ai < 2; ++ai) {
      for (int ci = 0; ci < 2; ++ci) {
        double sum = 0.0;
        for (std::size_t i = 0; i < s; ++i) {
          double inner = 0.0;
          for (std::size_t j = 0; j < s; ++j) inner += (*as[ai])[i][j] * (*cs[ci])[j];
          sum += (*bs[bi])[i] * inner;
        }
        add(3, std::string("b_") + tag[bi] + "*A_" + tag[ai] + "*c_" + tag[ci], sum,
            1.0 / 6.0);
      }
    }
  }

  out.order = 0;
  for (int p = 1; p <= 3; ++p) {
    if (out.max_residual_up_to(p) <= tol)
      out.order = p;
    else
      break;
  }
  return out;
}

ImexTableau make_imex1() {
  ImexTableau t;
  t.s = 2;
  t.name = "imex1";
  t.a_ex = zeros(2);
  t.a_im = zeros(2);
  t.a_ex[1][0] = 1.0;
  t.a_im[1][1] = 1.0;
  t.b_ex = {1.0, 0.0};
  t.b_im = {0.0, 1.0};
  t.c_ex = {0.0, 1.0};
  t.c_im = {0.0, 1.0};
  t.validate();
  return t;
}

ImexTableau make_imex1_4() {
  ImexTableau t;
  t.s = 5;
  t.name = "imex1_4";
  t.a_ex = zeros(5);
  t.a_im = zeros(5);
  for (std::size_t k = 1; k < 5; ++k) {
    for (std::size_t l = 0; l < k; ++l) t.a_ex[k][l] = 0.25;
    for (std::size_t l = 1; l <= k; ++l) t.a_im[k][l] = 0.25;
  }
  t.b_ex = {0.25, 0.25, 0.25, 0.25, 0.0};
  t.b_im = {0.0, 0.25, 0.25, 0.25, 0.25};
  t.c_ex = {0.0, 0.25, 0.5, 0.75, 1.0};
  t.c_im = t.c_ex;
  t.validate();
  return t;
}

ImexTableau make_ars233() {
  const double d = (3.0 + std::sqrt(3.0)) / 6.0;
  ImexTableau t;
  t.s = 3;
  t.name = "ars233";
  t.a_ex = zeros(3);
  t.a_im = zeros(3);
  t.a_ex[1][0] = d;
  t.a_ex[2][0] = d - 1.0;
  t.a_ex[2][1] = 2.0 * (1.0 - d);
  t.a_im[1][1] = d;
  t.a_im[2][1] = 1.0 - 2.0 * d;
  t.a_im[2][2] = d;
  t.b_ex = {0.0, 0.5, 0.5};
  t.b_im = t.b_ex;
  t.c_ex = {0.0, d, 1.0 - d};
  t.c_im = t.c_ex;
  t.validate();
  return t;
}

ImexTableau make_tvd3_4() {
  ImexTableau t;
  t.s = 4;
  t.name = "tvd3_4";
  t.a_ex = zeros(4);
  t.a_im = zeros(4);
  t.a_ex[1][0] = 0.2049503677289891;
  t.a_ex[2][0] = 0.2123925641886599;
  t.a_ex[2][1] = 0.2049201701400305;
  t.a_ex[3][0] = -0.4501877125339555;
  t.a_ex[3][1] = 0.3955748607480934;
  t.a_ex[3][2] = 0.9594331543518283;
  t.a_im[1][1] = 0.2049503677289891;
  t.a_im[2][1] = 0.2040104873103189;
  t.a_im[2][2] = 0.2133022470183705;
  t.a_im[3][1] = 0.3991926529002874;
  t.a_im[3][2] = 0.4115004113464103;
  t.a_im[3][3] = 0.0941272383192684;
  t.b_ex = {0.0, 0.3354718384287510, 0.3487815573407456, 0.3157466042305059};
  t.b_im = t.b_ex;
  t.c_ex = {0.0, 0.2049503677289891, 0.4173127343286904, 0.9048203025659662};
  t.c_im = t.c_ex;
  t.validate();
  return t;
}

ImexTableau make_tvd3_family(double gamma) {
  if (gamma == 0.0 || gamma == 1.0 / 3.0)
    throw std::invalid_argument("tvd3_family: gamma in {0, 1/3} is singular");
  const double g = gamma;
  const double c2 = (3.0 * g - 1.0) / (6.0 * g);
  const double c3 = (g + 1.0) / 2.0;
  ImexTableau t;
  t.s = 3;
  {
    char buf[64];
    std::snprintf(buf, sizeof buf, "tvd3_family(%.17g)", g);
    t.name = buf;
  }
  t.a_ex = zeros(3);
  t.a_im = zeros(3);
  t.a_ex[1][0] = c2;
  t.a_ex[2][0] = -(6.0 * g * g * g - 3.0 * g * g + 1.0) / (2.0 * (3.0 * g - 1.0));
  t.a_ex[2][1] = g * (3.0 * g * g + 1.0) / (3.0 * g - 1.0);
  t.a_im[1][1] = c2;
  t.a_im[2][1] = g;
  t.a_im[2][2] = (1.0 - g) / 2.0;
  t.b_ex = {0.0, 3.0 * g * g / (3.0 * g * g + 1.0), 1.0 / (3.0 * g * g + 1.0)};
  t.b_im = t.b_ex;
  t.c_ex = {0.0, c2, c3};  // row sums agree with the closed forms analytically
  t.c_im = {0.0, c2, c3};
  t.validate();
  return t;
}

ImexTableau builtin_tableau(const std::string& name) {
  if (name == "imex1") return make_imex1();
  if (name == "imex1_4") return make_imex1_4();
  if (name == "ars233") return make_ars233();
  if (name == "tvd3_4") return make_tvd3_4();
  if (name == "imex3") return make_tvd3_family(2.0 / 3.0);
  if (name.rfind("tvd3_family(", 0) == 0 && name.back() == ')') {
    const std::string arg = name.substr(12, name.size() - 13);
    return make_tvd3_family(std::stod(arg));
  }
  throw std::invalid_argument("builtin_tableau: unknown name '" + name + "'");
}

std::string tableau_to_json(const ImexTableau& t) {
  nlohmann::json j;
  j["s"] = t.s;
  j["A_ex"] = t.a_ex;
  j["A_im"] = t.a_im;
  j["b_ex"] = t.b_ex;
  j["b_im"] = t.b_im;
  j["c_ex"] = t.c_ex;
  j["c_im"] = t.c_im;
  if (!t.name.empty()) j["name"] = t.name;
  return j.dump(2);
}

ImexTableau tableau_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ImexTableau t;
  t.s = j.at("s").get<std::size_t>();
  t.a_ex = j.at("A_ex").get<std::vector<std::vector<double>>>();
  t.a_im = j.at("A_im").get<std::vector<std::vector<double>>>();
  t.b_ex = j.at("b_ex").get<std::vector<double>>();
  t.b_im = j.at("b_im").get<std::vector<double>>();
  t.c_ex = j.at("c_ex").get<std::vector<double>>();
  t.c_im = j.at("c_im").get<std::vector<double>>();
  if (j.contains("name")) t.name = j["name"].get<std::string>();
  t.validate();
  return t;
}

ImexTableau load_tableau(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_tableau: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return tableau_from_json(ss.str());
}

void save_tableau(const ImexTableau& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_tableau: cannot open " + path);
  out << tableau_to_json(t) << "\n";
}

}  // namespace tvdmood
