#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "idio/matrix.hpp"

namespace idio {

inline constexpr std::size_t kNumAntibodies = 16;  // N
inline constexpr std::size_t kNumAntigens = 8;     // L

enum class SelectionMode { S1, S2, S3 };

inline const char* to_string(SelectionMode m) {
  switch (m) {
    case SelectionMode::S1: return "S1";
    case SelectionMode::S2: return "S2";
    default: return "S3";
  }
}

struct ImmuneParams {
  double k1 = 0.625;  // suppression/stimulation inequality factor
  double k2 = 0.05;   // death-rate damping per tick
  double b = 80.0;    // rate constant
  SelectionMode mode = SelectionMode::S3;
};

class NoAntigenError : public std::runtime_error {
 public:
  NoAntigenError() : std::runtime_error("no antigen presenting") {}
};

class NoMatchingAntibodyError : public std::runtime_error {
 public:
  NoMatchingAntibodyError() : std::runtime_error("all antibodies have zero match") {}
};

// N x L match-strength table; the RL belief state. Entries clipped to [0,1].
class ParatopeMatrix {
 public:
  ParatopeMatrix() : m_(kNumAntibodies, kNumAntigens) {}
  explicit ParatopeMatrix(Matrix m) : m_(std::move(m)) {
    for (std::size_t r = 0; r < m_.rows(); ++r)
      for (std::size_t c = 0; c < m_.cols(); ++c)
        if (m_(r, c) < 0.0 || m_(r, c) > 1.0)
          throw std::runtime_error("paratope entry out of [0,1]");
  }

  std::size_t antibodies() const { return m_.rows(); }
  std::size_t antigens() const { return m_.cols(); }
  double at(std::size_t antibody, std::size_t antigen) const { return m_(antibody, antigen); }

  void reinforce(std::size_t antibody, std::size_t antigen, double rf) {
    double v = m_(antibody, antigen) + rf;
    m_(antibody, antigen) = std::clamp(v, 0.0, 1.0);
  }

  const Matrix& raw() const { return m_; }

 private:
  Matrix m_;
};

// Fixed N x L disallowance table; each row sums to 1.
class IdiotopeMatrix {
 public:
  IdiotopeMatrix() : m_(kNumAntibodies, kNumAntigens) {}
  explicit IdiotopeMatrix(Matrix m) : m_(std::move(m)) {
    for (std::size_t r = 0; r < m_.rows(); ++r) {
      for (std::size_t c = 0; c < m_.cols(); ++c)
        if (m_(r, c) < 0.0 || m_(r, c) > 1.0)
          throw std::runtime_error("idiotope entry out of [0,1]");
      // a null row carries no disallowance information; any other row must sum to 1
      double sum = m_.row_sum(r);
      if (sum != 0.0 && std::abs(sum - 1.0) > 1e-9)
        throw std::runtime_error("idiotope row " + std::to_string(r) + " does not sum to 1");
    }
  }

  std::size_t antibodies() const { return m_.rows(); }
  std::size_t antigens() const { return m_.cols(); }
  double at(std::size_t antibody, std::size_t antigen) const { return m_(antibody, antigen); }
  const Matrix& raw() const { return m_; }

 private:
  Matrix m_;
};

// Weighted antigen array G. The dominant entry is stored as 2 but is
// evaluated per antibody: it contributes 0 when the antibody's paratope
// element for the dominant antigen is zero (strong mode only).
struct AntigenArray {
  std::vector<double> weights;  // 0, 1/4, or 2
  std::size_t dominant = 0;
  bool weak = false;
};

inline AntigenArray build_antigen_array(const std::vector<std::size_t>& presenting,
                                        const std::vector<std::size_t>& priority,
                                        bool weak_mode, std::size_t num_antigens = kNumAntigens) {
  if (presenting.empty()) throw NoAntigenError();
  AntigenArray g;
  g.weights.assign(num_antigens, 0.0);
  g.weak = weak_mode;
  // priority[k] is the antigen id at rank k, most urgent first
  std::size_t best_rank = priority.size();
  for (std::size_t a : presenting) {
    for (std::size_t k = 0; k < priority.size(); ++k) {
      if (priority[k] == a && k < best_rank) {
        best_rank = k;
        g.dominant = a;
      }
    }
    g.weights[a] = 0.25;
  }
  g.weights[g.dominant] = 2.0;
  return g;
}

// Eq-(3)/(11) strength of match, with the per-antibody dominant rule.
inline std::vector<double> strength_of_match_t1(const ParatopeMatrix& p, const AntigenArray& g) {
  std::vector<double> t1(p.antibodies(), 0.0);
  for (std::size_t i = 0; i < p.antibodies(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < p.antigens(); ++j) {
      double w = g.weights[j];
      if (j == g.dominant && !g.weak && p.at(i, j) <= 0.0) w = 0.0;
      s += p.at(i, j) * w;
    }
    t1[i] = s;
  }
  return t1;
}

// argmax with lowest-index tie-break
inline std::size_t argmax_low(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

inline std::size_t select_antigenic_antibody(const std::vector<double>& t1) {
  std::size_t w = argmax_low(t1);
  if (t1[w] <= 0.0) throw NoMatchingAntibodyError();
  return w;
}

// H: 1 for competitors, 0 for the antigenic antibody and zero-match antibodies
inline std::vector<std::uint8_t> build_competitor_mask(const std::vector<double>& t1,
                                                       std::size_t stage1) {
  std::vector<std::uint8_t> h(t1.size(), 0);
  for (std::size_t i = 0; i < t1.size(); ++i)
    h[i] = (i != stage1 && t1[i] > 0.0) ? 1 : 0;
  return h;
}

struct ConcentrationVector {
  std::vector<double> values;

  static ConcentrationVector uniform(std::size_t n) {
    return ConcentrationVector{std::vector<double>(n, 1.0)};
  }
  double sum() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
};

// Eq (4)/(12): suppression of competitor i by the stage-1 winner
inline std::vector<double> suppression_t2(const ParatopeMatrix& p, const IdiotopeMatrix& idio,
                                          const std::vector<std::uint8_t>& mask, std::size_t stage1,
                                          const ConcentrationVector& conc) {
  std::vector<double> t2(p.antibodies(), 0.0);
  for (std::size_t i = 0; i < p.antibodies(); ++i) {
    if (!mask[i]) continue;
    double s = 0.0;
    for (std::size_t m = 0; m < p.antigens(); ++m) s += p.at(stage1, m) * idio.at(i, m);
    t2[i] = s * conc.values[i] * conc.values[stage1];
  }
  return t2;
}

// Eq (5)/(13): stimulation of competitor i by the stage-1 winner
inline std::vector<double> stimulation_t3(const ParatopeMatrix& p, const IdiotopeMatrix& idio,
                                          const std::vector<std::uint8_t>& mask, std::size_t stage1,
                                          const ConcentrationVector& conc) {
  std::vector<double> t3(p.antibodies(), 0.0);
  for (std::size_t i = 0; i < p.antibodies(); ++i) {
    if (!mask[i]) continue;
    double s = 0.0;
    for (std::size_t q = 0; q < p.antigens(); ++q)
      s += (1.0 - p.at(i, q)) * idio.at(stage1, q);
    t3[i] = s * conc.values[i] * conc.values[stage1];
  }
  return t3;
}

// Eq (6)
inline std::vector<double> global_strength_tg(const std::vector<double>& t1,
                                              const std::vector<double>& t2,
                                              const std::vector<double>& t3, double k1) {
  std::vector<double> tg(t1.size());
  for (std::size_t i = 0; i < t1.size(); ++i) tg[i] = t1[i] - k1 * t2[i] + t3[i];
  return tg;
}

// Eq (8), floored at 0
inline ConcentrationVector update_concentrations(const ConcentrationVector& conc,
                                                 const std::vector<double>& tg,
                                                 const ImmuneParams& params) {
  ConcentrationVector next;
  next.values.resize(conc.values.size());
  for (std::size_t i = 0; i < conc.values.size(); ++i) {
    double v = conc.values[i] + params.b * tg[i] - params.k2 * conc.values[i];
    next.values[i] = std::max(0.0, v);
  }
  return next;
}

// Eq (14) scaled by N; all-zero sum resets to uniform
inline ConcentrationVector normalize_concentrations(const ConcentrationVector& conc) {
  double s = conc.sum();
  std::size_t n = conc.values.size();
  if (s <= 0.0) return ConcentrationVector::uniform(n);
  ConcentrationVector out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.values[i] = static_cast<double>(n) * conc.values[i] / s;
  return out;
}

// Eq (9)
inline std::vector<double> activation(const ConcentrationVector& conc_next,
                                      const std::vector<double>& tg) {
  std::vector<double> a(tg.size());
  for (std::size_t i = 0; i < tg.size(); ++i) a[i] = conc_next.values[i] * tg[i];
  return a;
}

// Penalized antibody keeps its previous-iteration concentration; renormalized.
inline ConcentrationVector rollback_concentration(const ConcentrationVector& conc_prev,
                                                  const ConcentrationVector& conc_next,
                                                  std::size_t penalized) {
  ConcentrationVector out = conc_next;
  out.values[penalized] = conc_prev.values[penalized];
  return normalize_concentrations(out);
}

// Per-decision record of the full selection pipeline.
struct SelectionTrace {
  std::vector<std::size_t> presenting;
  std::size_t dominant = 0;
  std::vector<double> t1, t2, t3, tg, act;
  std::size_t stage1_winner = 0;
  std::size_t final_winner = 0;
  bool idiotypic_difference = false;
};

// One decision tick: G -> T1 -> stage-1 winner -> H -> T2/T3 -> Tg ->
// Eq (8) -> floor -> Eq (14) -> A -> winner. In S1/S2 the concentration
// state is held at 1 and left untouched.
inline SelectionTrace select_winner(const ParatopeMatrix& p, const IdiotopeMatrix& idio,
                                    const AntigenArray& g, ConcentrationVector& conc,
                                    const ImmuneParams& params) {
  SelectionTrace tr;
  for (std::size_t j = 0; j < g.weights.size(); ++j)
    if (g.weights[j] > 0.0) tr.presenting.push_back(j);
  tr.dominant = g.dominant;

  tr.t1 = strength_of_match_t1(p, g);
  tr.stage1_winner = select_antigenic_antibody(tr.t1);
  auto mask = build_competitor_mask(tr.t1, tr.stage1_winner);

  bool s3 = params.mode == SelectionMode::S3;
  ConcentrationVector unit = ConcentrationVector::uniform(p.antibodies());
  const ConcentrationVector& c_in = s3 ? conc : unit;

  tr.t2 = suppression_t2(p, idio, mask, tr.stage1_winner, c_in);
  tr.t3 = stimulation_t3(p, idio, mask, tr.stage1_winner, c_in);
  tr.tg = global_strength_tg(tr.t1, tr.t2, tr.t3, params.k1);
  // non-competitors carry no strength at all
  for (std::size_t i = 0; i < tr.tg.size(); ++i)
    if (!mask[i] && i != tr.stage1_winner) tr.tg[i] = 0.0;

  switch (params.mode) {
    case SelectionMode::S1:
      tr.final_winner = tr.stage1_winner;
      break;
    case SelectionMode::S2:
      tr.final_winner = argmax_low(tr.tg);
      break;
    case SelectionMode::S3: {
      ConcentrationVector next = update_concentrations(conc, tr.tg, params);
      conc = normalize_concentrations(next);
      tr.act = activation(conc, tr.tg);
      tr.final_winner = argmax_low(tr.act);
      break;
    }
  }
  tr.idiotypic_difference = tr.final_winner != tr.stage1_winner;
  return tr;
}

}  // namespace idio
