#include <json.hpp>

#include "core/samplers.hpp"

namespace mcdiag {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(Errc::parse, "sampler spec: invalid JSON");
  return j;
}

double num(const json& j, const char* key, double fallback, bool required = false) {
  if (!j.contains(key)) {
    if (required) fail(Errc::parse, std::string("sampler spec: missing '") + key + "'");
    return fallback;
  }
  if (!j.at(key).is_number()) fail(Errc::parse, std::string("sampler spec: '") + key + "' must be a number");
  return j.at(key).get<double>();
}

Target parse_target(const json& j) {
  if (!j.contains("target") || !j.at("target").is_object())
    fail(Errc::parse, "sampler spec: missing 'target' object");
  const json& t = j.at("target");
  const std::string type = t.value("type", "");
  if (type == "ar1") {
    Ar1Target a;
    a.rho = num(t, "rho", 0.0, true);
    a.nu = num(t, "nu", 1.0);
    return a;
  }
  if (type == "t") {
    TTarget tt;
    tt.df = num(t, "df", 5.0, true);
    return tt;
  }
  if (type == "bimodal") {
    BimodalTarget b;
    b.weight1 = num(t, "weight1", 0.5);
    b.mean1 = num(t, "mean1", 0.0, true);
    b.var1 = num(t, "var1", 1.0, true);
    b.mean2 = num(t, "mean2", 0.0, true);
    b.var2 = num(t, "var2", 1.0, true);
    return b;
  }
  if (type == "logistic") {
    LogisticTarget lg;
    lg.prior_var = num(t, "prior_var", 100.0);
    Dataset d;
    if (t.contains("dataset_csv")) {
      d = load_passenger_csv(t.at("dataset_csv").get<std::string>());
      if (t.value("standardize", false)) standardize_covariates(d);
    } else if (t.contains("design") && t.contains("response")) {
      const json& dj = t.at("design");
      const json& rj = t.at("response");
      if (!dj.is_array() || dj.empty() || !dj.front().is_array())
        fail(Errc::parse, "sampler spec: 'design' must be an array of rows");
      d.x = Matrix(dj.size(), dj.front().size());
      for (std::size_t i = 0; i < dj.size(); ++i) {
        if (dj[i].size() != d.x.cols) fail(Errc::parse, "sampler spec: ragged design rows");
        for (std::size_t k = 0; k < d.x.cols; ++k) d.x(i, k) = dj[i][k].get<double>();
      }
      if (!rj.is_array() || rj.size() != d.x.rows)
        fail(Errc::parse, "sampler spec: 'response' must match design rows");
      d.y.resize(rj.size());
      for (std::size_t i = 0; i < rj.size(); ++i) d.y[i] = rj[i].get<int>();
    } else {
      fail(Errc::parse, "sampler spec: logistic target needs 'dataset_csv' or design/response");
    }
    lg.x = std::make_shared<const Matrix>(std::move(d.x));
    lg.y = std::make_shared<const std::vector<int>>(std::move(d.y));
    return lg;
  }
  fail(Errc::parse, "sampler spec: unknown target type '" + type + "'");
}

StartSpec parse_start(const json& j, const Target& target, std::size_t m) {
  StartSpec s;
  // Defaults: ar1 stationary, everything else must say what it wants unless
  // a sensible convention exists (t from t2; logistic from the MLE spread).
  if (!j.contains("start")) {
    if (std::holds_alternative<Ar1Target>(target)) {
      s.kind = StartSpec::Kind::stationary;
    } else if (std::holds_alternative<TTarget>(target)) {
      s.kind = StartSpec::Kind::t_dist;
      s.t_df = 2.0;
    } else if (std::holds_alternative<LogisticTarget>(target)) {
      s.kind = StartSpec::Kind::mle_spread;
    } else {
      const auto& b = std::get<BimodalTarget>(target);
      s.kind = StartSpec::Kind::normal_dist;
      s.mean = 0.5 * (b.mean1 + b.mean2);
      const double half = 0.5 * (b.mean2 - b.mean1);
      s.var = std::max(1.0, half * half);
    }
    return s;
  }
  const json& sj = j.at("start");
  const std::string type = sj.value("type", "");
  if (type == "stationary") {
    s.kind = StartSpec::Kind::stationary;
  } else if (type == "t") {
    s.kind = StartSpec::Kind::t_dist;
    s.t_df = num(sj, "df", 2.0);
  } else if (type == "normal") {
    s.kind = StartSpec::Kind::normal_dist;
    s.mean = num(sj, "mean", 0.0, true);
    s.var = num(sj, "var", 1.0, true);
  } else if (type == "mle_spread") {
    s.kind = StartSpec::Kind::mle_spread;
    s.span = num(sj, "span", 3.0);
  } else if (type == "fixed") {
    s.kind = StartSpec::Kind::fixed;
    if (!sj.contains("values") || !sj.at("values").is_array())
      fail(Errc::parse, "sampler spec: fixed start needs 'values'");
    const json& vj = sj.at("values");
    if (vj.size() != m) fail(Errc::parse, "sampler spec: fixed start needs one row per chain");
    const std::size_t p = target_dimension(target);
    s.values = Matrix(m, p);
    for (std::size_t i = 0; i < m; ++i) {
      const json& row = vj[i];
      if (row.is_number() && p == 1) {
        s.values(i, 0) = row.get<double>();
      } else if (row.is_array() && row.size() == p) {
        for (std::size_t k = 0; k < p; ++k) s.values(i, k) = row[k].get<double>();
      } else {
        fail(Errc::parse, "sampler spec: fixed start rows must have p values");
      }
    }
  } else {
    fail(Errc::parse, "sampler spec: unknown start type '" + type + "'");
  }
  return s;
}

}  // namespace

SamplerSpec sampler_spec_from_json(const std::string& text) {
  const json j = parse(text);
  SamplerSpec spec;
  spec.target = parse_target(j);
  spec.proposal_var = num(j, "proposal_var", 1.0);
  const double m = num(j, "chains", 1.0);
  if (!(m >= 1.0)) fail(Errc::parse, "sampler spec: 'chains' must be >= 1");
  spec.m = static_cast<std::size_t>(m);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
      fail(Errc::parse, "sampler spec: 'seed' must be an integer");
    spec.seed = j.at("seed").get<std::uint64_t>();
  }
  spec.start = parse_start(j, spec.target, spec.m);
  return spec;
}

}  // namespace mcdiag
