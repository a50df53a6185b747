// Command-line surface: dataset-driven fitting, complexity profiling, model
// selection, cross-method comparison, and the simulation sweep.  All heavy
// lifting lives in the library; this file parses flags, orchestrates calls,
// and writes JSON / tidy CSV artifacts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <cxxabi.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "plsreg/baselines.hpp"
#include "plsreg/dataprep.hpp"
#include "plsreg/dof_krylov.hpp"
#include "plsreg/dof_lanczos.hpp"
#include "plsreg/dof_profile.hpp"
#include "plsreg/errors.hpp"
#include "plsreg/pls.hpp"
#include "plsreg/rng.hpp"
#include "plsreg/selection.hpp"
#include "plsreg/simulate.hpp"
#include "plsreg/threading.hpp"
#include "schemas.hpp"

using json = nlohmann::ordered_json;
using namespace plsreg;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------- formatting

std::string fmt(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string csv_num(double v) { return std::isfinite(v) ? fmt(v) : std::string(); }

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string quoted = "\"";
  for (char c : cell) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

json num_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double median_finite(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(),
                              [](double v) { return !std::isfinite(v); }),
               values.end());
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

// ------------------------------------------------------------------- output

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open output file '" + path + "'");
  out << text;
  if (!out) throw InputError("failed writing output file '" + path + "'");
}

std::string dump_json(const json& value) { return value.dump(2) + "\n"; }

// ------------------------------------------------------------- error naming

std::string error_name(const std::exception& e) {
  int status = 0;
  char* demangled = abi::__cxa_demangle(typeid(e).name(), nullptr, nullptr, &status);
  std::string name = (status == 0 && demangled != nullptr) ? demangled : typeid(e).name();
  std::free(demangled);
  const auto pos = name.rfind("::");
  return pos == std::string::npos ? name : name.substr(pos + 2);
}

// The module-level error a truncation reason corresponds to.
std::string reason_error_name(TruncationReason reason) {
  switch (reason) {
    case TruncationReason::DegenerateComponent: return "DegenerateComponent";
    case TruncationReason::NegativeDof: return "NumericalInstability";
    case TruncationReason::SingularBasis: return "SingularBasis";
    case TruncationReason::None: break;
  }
  return "None";
}

void warn_truncation(const std::string& label, const DofProfile& profile) {
  if (!profile.truncated_at) return;
  std::cerr << "warning: " << label << " profile truncated at m=" << *profile.truncated_at
            << ": " << reason_error_name(profile.reason) << " ("
            << to_string(profile.reason) << ")\n";
}

// --------------------------------------------------------------- common I/O

RawDataset load_input(const std::string& path, const std::string& target) {
  if (path.empty()) throw ConfigError("--input is required");
  return load_csv(path, target);
}

int effective_cap(const RawDataset& raw, int m_max) {
  return static_cast<int>(std::min<Index>({static_cast<Index>(m_max), raw.n() - 1, raw.p()}));
}

// Squared prediction error of every path position against a holdout set.
std::vector<double> holdout_curve(const PlsModel& model, const StandardizedData& data,
                                  const RawDataset& holdout, int rows) {
  std::vector<double> mse(static_cast<std::size_t>(rows));
  for (int m = 0; m < rows; ++m) {
    AffineCoefficients coef = coefficients_original_scale(model, m, data);
    const Vector pred = predict(coef.intercept, coef.beta, holdout.X);
    mse[static_cast<std::size_t>(m)] =
        (pred - holdout.y).squaredNorm() / static_cast<double>(holdout.n());
  }
  return mse;
}

// ---------------------------------------------------------------------- fit

struct FitOptions {
  std::string input, output;
  std::string target = "y";
  std::string format = "json";
  int m_max = 10;
  bool schema = false;
};

int run_fit(const FitOptions& opt) {
  if (opt.schema) {
    std::cout << cli::kFitSchema;
    return 0;
  }
  RawDataset raw = load_input(opt.input, opt.target);
  StandardizedData data = standardize(raw);
  PlsModel model = fit_pls(data, effective_cap(raw, opt.m_max));
  const Vector y = raw.y;

  if (opt.format == "csv") {
    std::ostringstream out;
    out << "m,quantity,key,value\n";
    for (int m = 0; m <= model.components(); ++m) {
      AffineCoefficients coef = coefficients_original_scale(model, m, data);
      out << m << ",intercept,," << fmt(coef.intercept) << "\n";
      for (Index j = 0; j < raw.p(); ++j)
        out << m << ",coefficient," << csv_escape(raw.names[static_cast<std::size_t>(j)])
            << "," << fmt(coef.beta(j)) << "\n";
      out << m << ",rss,," << fmt((y - model.fitted_path.col(m)).squaredNorm()) << "\n";
      for (Index i = 0; i < raw.n(); ++i)
        out << m << ",fitted," << i << "," << fmt(model.fitted_path(i, m)) << "\n";
    }
    write_text(opt.output, out.str());
    return 0;
  }

  json doc;
  doc["command"] = "fit";
  doc["input"] = opt.input;
  doc["target"] = opt.target;
  doc["n"] = raw.n();
  doc["p"] = raw.p();
  doc["m_max"] = opt.m_max;
  doc["components"] = model.components();
  doc["truncated_at"] = model.truncated_at ? json(*model.truncated_at) : json(nullptr);
  doc["terms"] = raw.names;
  json path = json::array();
  for (int m = 0; m <= model.components(); ++m) {
    AffineCoefficients coef = coefficients_original_scale(model, m, data);
    json entry;
    entry["m"] = m;
    entry["intercept"] = coef.intercept;
    entry["coefficients"] = std::vector<double>(coef.beta.data(), coef.beta.data() + coef.beta.size());
    entry["rss"] = (y - model.fitted_path.col(m)).squaredNorm();
    entry["fitted"] = std::vector<double>(model.fitted_path.col(m).data(),
                                          model.fitted_path.col(m).data() + raw.n());
    path.push_back(entry);
  }
  doc["path"] = path;
  write_text(opt.output, dump_json(doc));
  return 0;
}

// ---------------------------------------------------------------------- dof

struct DofOptions {
  std::string input, output;
  std::string target = "y";
  std::string format = "json";
  std::string engine = "both";
  int m_max = 10;
  bool schema = false;
};

int run_dof(const DofOptions& opt) {
  if (opt.schema) {
    std::cout << cli::kDofSchema;
    return 0;
  }
  RawDataset raw = load_input(opt.input, opt.target);
  StandardizedData data = standardize(raw);
  const int cap = effective_cap(raw, opt.m_max);

  std::optional<DofProfile> lanczos, krylov, naive;
  if (opt.engine == "lanczos" || opt.engine == "both") {
    lanczos = dof_profile_lanczos(data, cap);
    warn_truncation("lanczos", *lanczos);
  }
  if (opt.engine == "krylov" || opt.engine == "both") {
    PlsModel model = fit_pls(data, cap);
    krylov = dof_profile_krylov(data, model, cap);
    warn_truncation("krylov", *krylov);
  }
  if (opt.engine == "naive") {
    PlsModel model = fit_pls(data, cap);
    naive = dof_profile_naive(model.components());
    if (model.truncated_at) {
      naive->truncated_at = *model.truncated_at;
      naive->reason = TruncationReason::DegenerateComponent;
    }
    warn_truncation("naive", *naive);
  }

  // Effective table truncation: the earliest engine stop.
  std::optional<int> truncated_at;
  TruncationReason reason = TruncationReason::None;
  for (const auto* profile : {&lanczos, &krylov, &naive}) {
    if (!profile->has_value() || !(*profile)->truncated_at) continue;
    if (!truncated_at || *(*profile)->truncated_at < *truncated_at) {
      truncated_at = *(*profile)->truncated_at;
      reason = (*profile)->reason;
    }
  }

  std::optional<double> max_disagreement;
  if (lanczos && krylov) {
    const std::size_t shared = std::min(lanczos->dof.size(), krylov->dof.size());
    double worst = 0.0;
    for (std::size_t m = 0; m < shared; ++m)
      worst = std::max(worst, std::abs(lanczos->dof[m] - krylov->dof[m]));
    max_disagreement = worst;
  }

  if (opt.format == "csv") {
    std::ostringstream out;
    out << "m,engine,dof\n";
    auto emit = [&out](const char* name, const DofProfile& profile) {
      for (std::size_t m = 0; m < profile.dof.size(); ++m)
        out << m << "," << name << "," << fmt(profile.dof[m]) << "\n";
    };
    if (lanczos) emit("lanczos", *lanczos);
    if (krylov) emit("krylov", *krylov);
    if (naive) emit("naive", *naive);
    if (max_disagreement)
      std::cerr << "info: max engine disagreement " << fmt(*max_disagreement) << "\n";
    write_text(opt.output, out.str());
    return 0;
  }

  json doc;
  doc["command"] = "dof";
  doc["input"] = opt.input;
  doc["target"] = opt.target;
  doc["engine"] = opt.engine;
  doc["n"] = raw.n();
  doc["p"] = raw.p();
  doc["m_max"] = opt.m_max;
  json rows = json::array();
  std::size_t limit = 0;
  for (const auto* profile : {&lanczos, &krylov, &naive})
    if (profile->has_value()) limit = std::max(limit, (*profile)->dof.size());
  for (std::size_t m = 0; m < limit; ++m) {
    json row;
    row["m"] = m;
    if (opt.engine == "both") {
      if (lanczos && m < lanczos->dof.size()) row["lanczos"] = lanczos->dof[m];
      if (krylov && m < krylov->dof.size()) row["krylov"] = krylov->dof[m];
    } else {
      const DofProfile& only = lanczos ? *lanczos : (krylov ? *krylov : *naive);
      row["dof"] = only.dof[m];
    }
    rows.push_back(row);
  }
  doc["rows"] = rows;
  if (max_disagreement) doc["max_disagreement"] = *max_disagreement;
  doc["truncated_at"] = truncated_at ? json(*truncated_at) : json(nullptr);
  doc["reason"] = to_string(reason);
  write_text(opt.output, dump_json(doc));
  return 0;
}

// ------------------------------------------------------------------- select

struct SelectOptions {
  std::string input, output, test;
  std::string target = "y";
  std::string format = "json";
  std::string method = "cv";
  int m_max = 10;
  int folds = 10;
  std::uint64_t seed = 0;
  bool schema = false;
};

SelectionMethod parse_method(const std::string& name) {
  if (name == "cv") return SelectionMethod::Cv;
  if (name == "bic-lanczos") return SelectionMethod::BicLanczos;
  if (name == "bic-krylov") return SelectionMethod::BicKrylov;
  if (name == "bic-naive") return SelectionMethod::BicNaive;
  throw ConfigError("unknown selection method '" + name + "'");
}

int run_select(const SelectOptions& opt) {
  if (opt.schema) {
    std::cout << cli::kSelectSchema;
    return 0;
  }
  RawDataset raw = load_input(opt.input, opt.target);
  StandardizedData data = standardize(raw);
  const SelectionMethod method = parse_method(opt.method);

  CriterionTable table;
  if (method == SelectionMethod::Cv) {
    CvConfig config;
    config.folds = opt.folds;
    config.seed = opt.seed;
    table = cross_validate(raw, opt.m_max, config);
  } else {
    table = select_bic(data, opt.m_max, method);
  }

  std::vector<double> holdout;
  if (!opt.test.empty()) {
    RawDataset held = load_csv(opt.test, opt.target);
    if (held.p() != raw.p())
      throw DimensionMismatch("holdout file has a different number of predictors");
    if (held.names != raw.names)
      throw InvalidDataset("holdout columns do not match the training columns");
    PlsModel model = fit_pls(data, effective_cap(raw, opt.m_max));
    holdout = holdout_curve(model, data, held, static_cast<int>(table.rows.size()));
  }

  const bool is_cv = method == SelectionMethod::Cv;
  if (opt.format == "csv") {
    std::ostringstream out;
    out << "m,rss,dof,sigma2_hat,criterion,valid,chosen";
    if (!holdout.empty()) out << ",holdout_mse";
    out << "\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const CriterionRow& row = table.rows[i];
      out << row.m << "," << fmt(row.rss) << "," << fmt(row.dof) << ","
          << csv_num(row.sigma2_hat) << "," << csv_num(row.criterion) << ","
          << (row.valid ? "true" : "false") << ","
          << (row.m == table.chosen_m ? "true" : "false");
      if (!holdout.empty()) out << "," << fmt(holdout[i]);
      out << "\n";
    }
    write_text(opt.output, out.str());
    return 0;
  }

  json doc;
  doc["command"] = "select";
  doc["input"] = opt.input;
  doc["target"] = opt.target;
  doc["method"] = opt.method;
  doc["n"] = raw.n();
  doc["p"] = raw.p();
  doc["m_max"] = opt.m_max;
  doc["folds"] = is_cv ? json(opt.folds) : json(nullptr);
  doc["seed"] = is_cv ? json(opt.seed) : json(nullptr);
  doc["criterion"] = is_cv ? "cv-mse" : "bic";
  doc["chosen_m"] = table.chosen_m;
  doc["chosen_dof"] = num_or_null(table.chosen().dof);
  doc["sigma_hat"] = num_or_null(std::sqrt(table.chosen().sigma2_hat));
  json rows = json::array();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const CriterionRow& row = table.rows[i];
    json entry;
    entry["m"] = row.m;
    entry["rss"] = row.rss;
    entry["dof"] = row.dof;
    entry["sigma2_hat"] = num_or_null(row.sigma2_hat);
    entry["criterion"] = num_or_null(row.criterion);
    entry["valid"] = row.valid;
    if (!holdout.empty()) entry["holdout_mse"] = holdout[i];
    rows.push_back(entry);
  }
  doc["rows"] = rows;
  doc["holdout_mse"] = holdout.empty()
                           ? json(nullptr)
                           : json(holdout[static_cast<std::size_t>(table.chosen_m)]);
  doc["truncated_at"] = table.truncated_at ? json(*table.truncated_at) : json(nullptr);
  doc["reason"] = to_string(table.reason);
  write_text(opt.output, dump_json(doc));
  return 0;
}

// ------------------------------------------------------------------ compare

struct CompareOptions {
  std::string input;
  std::string target = "y";
  std::string output = "compare";
  int m_max = 20;
  int reps = 50;
  int train_size = 50;
  int test_size = 0;  // 0: every remaining row
  int folds = 10;
  std::uint64_t seed = 0;
  std::vector<double> lambdas;
  bool schema = false;
};

RawDataset take_rows(const RawDataset& data, const std::vector<Index>& order, Index lo,
                     Index hi) {
  RawDataset out;
  out.names = data.names;
  out.X.resize(hi - lo, data.p());
  out.y.resize(hi - lo);
  for (Index k = lo; k < hi; ++k) {
    out.X.row(k - lo) = data.X.row(order[static_cast<std::size_t>(k)]);
    out.y(k - lo) = data.y(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

// Contiguous-block fold bounds over n rows.
std::vector<std::pair<Index, Index>> fold_bounds(Index n, int folds) {
  std::vector<std::pair<Index, Index>> bounds;
  for (int f = 0; f < folds; ++f)
    bounds.emplace_back((n * f) / folds, (n * (f + 1)) / folds);
  return bounds;
}

// Fold-wise squared prediction error of the principal-components path;
// only sizes reachable in every fold are eligible.
int cv_choose_pcr(const RawDataset& train, int requested, int folds) {
  const Index n = train.n();
  std::vector<Index> identity(static_cast<std::size_t>(n));
  std::iota(identity.begin(), identity.end(), Index{0});
  std::vector<double> sse(static_cast<std::size_t>(requested) + 1, 0.0);
  int usable = requested;
  for (const auto& [lo, hi] : fold_bounds(n, folds)) {
    RawDataset held = take_rows(train, identity, lo, hi);
    RawDataset rest;
    rest.names = train.names;
    rest.X.resize(n - (hi - lo), train.p());
    rest.y.resize(n - (hi - lo));
    Index ti = 0;
    for (Index k = 0; k < n; ++k) {
      if (k >= lo && k < hi) continue;
      rest.X.row(ti) = train.X.row(k);
      rest.y(ti) = train.y(k);
      ++ti;
    }
    StandardizedData rest_std = standardize(rest);
    const int cap = static_cast<int>(std::min<Index>(
        {static_cast<Index>(requested), fit_ols(rest_std).rank}));
    usable = std::min(usable, cap);
    PcrModel pcr = fit_pcr(rest_std, cap);
    for (int m = 0; m <= cap; ++m) {
      AffineCoefficients coef = to_original_scale(rest_std, pcr.beta_path.col(m));
      const Vector pred = predict(coef.intercept, coef.beta, held.X);
      sse[static_cast<std::size_t>(m)] += (pred - held.y).squaredNorm();
    }
  }
  int best = 0;
  for (int m = 1; m <= usable; ++m)
    if (sse[static_cast<std::size_t>(m)] < sse[static_cast<std::size_t>(best)]) best = m;
  return best;
}

double cv_choose_ridge(const RawDataset& train, const std::vector<double>& lambdas, int folds) {
  const Index n = train.n();
  std::vector<double> sse(lambdas.size(), 0.0);
  for (const auto& [lo, hi] : fold_bounds(n, folds)) {
    RawDataset rest;
    rest.names = train.names;
    rest.X.resize(n - (hi - lo), train.p());
    rest.y.resize(n - (hi - lo));
    Matrix held_X(hi - lo, train.p());
    Vector held_y(hi - lo);
    Index ti = 0;
    for (Index k = 0; k < n; ++k) {
      if (k >= lo && k < hi) {
        held_X.row(k - lo) = train.X.row(k);
        held_y(k - lo) = train.y(k);
      } else {
        rest.X.row(ti) = train.X.row(k);
        rest.y(ti) = train.y(k);
        ++ti;
      }
    }
    StandardizedData rest_std = standardize(rest);
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      RidgeModel ridge = fit_ridge(rest_std, lambdas[k]);
      AffineCoefficients coef = to_original_scale(rest_std, ridge.beta);
      const Vector pred = predict(coef.intercept, coef.beta, held_X);
      sse[k] += (pred - held_y).squaredNorm();
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < sse.size(); ++k)
    if (sse[k] < sse[best]) best = k;
  return lambdas[best];
}

int run_compare(const CompareOptions& opt) {
  if (opt.schema) {
    std::cout << cli::kCompareSchema;
    return 0;
  }
  RawDataset raw = load_input(opt.input, opt.target);
  const Index n = raw.n();
  if (opt.reps < 1) throw ConfigError("--reps must be positive");
  if (opt.train_size < 4) throw ConfigError("--train-size must be at least 4");
  const Index test_size =
      opt.test_size > 0 ? static_cast<Index>(opt.test_size) : n - opt.train_size;
  if (static_cast<Index>(opt.train_size) + test_size > n)
    throw SplitTooLarge("train+test exceeds the dataset rows");
  if (test_size < 1) throw SplitTooLarge("no rows left for testing");

  std::vector<double> lambdas = opt.lambdas;
  if (lambdas.empty()) {
    // Logarithmic default grid 1e-4 .. 1e4.
    for (int k = 0; k <= 20; ++k) lambdas.push_back(std::pow(10.0, -4.0 + 0.4 * k));
  }

  const int m_eff = static_cast<int>(
      std::min<Index>({static_cast<Index>(opt.m_max), static_cast<Index>(opt.train_size) - 1,
                       raw.p()}));

  struct RepRow {
    int rep;
    std::string method;
    double chosen_m = kNaN;
    double lambda = kNaN;
    double chosen_dof = kNaN;
    double test_mse = kNaN;
  };
  std::vector<RepRow> metrics;

  for (int rep = 0; rep < opt.reps; ++rep) {
    Philox rng(opt.seed, 0xc3000000ull + static_cast<std::uint64_t>(rep));
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    shuffle(order, rng);
    RawDataset train = take_rows(raw, order, 0, opt.train_size);
    RawDataset test = take_rows(raw, order, opt.train_size, opt.train_size + test_size);
    StandardizedData train_std = standardize(train);

    auto mse_of = [&test](double intercept, const Vector& beta) {
      const Vector pred = predict(intercept, beta, test.X);
      return (pred - test.y).squaredNorm() / static_cast<double>(test.n());
    };

    {  // projection path, size chosen by unshuffled-fold cross-validation
      CvConfig config;
      config.folds = opt.folds;
      config.shuffle = false;
      CriterionTable table = cross_validate(train, m_eff, config);
      PlsModel model = fit_pls(train_std, table.chosen_m);
      AffineCoefficients coef = coefficients_original_scale(model, table.chosen_m, train_std);
      metrics.push_back({rep, "pls", static_cast<double>(table.chosen_m), kNaN,
                         table.chosen().dof, mse_of(coef.intercept, coef.beta)});
    }
    {  // principal components on the same folds
      const int chosen = cv_choose_pcr(train, m_eff, opt.folds);
      PcrModel pcr = fit_pcr(train_std, chosen);
      AffineCoefficients coef = to_original_scale(train_std, pcr.beta_path.col(chosen));
      metrics.push_back({rep, "pcr", static_cast<double>(chosen), kNaN, pcr.dof(chosen),
                         mse_of(coef.intercept, coef.beta)});
    }
    {  // ridge over the penalty grid
      const double lambda = cv_choose_ridge(train, lambdas, opt.folds);
      RidgeModel ridge = fit_ridge(train_std, lambda);
      AffineCoefficients coef = to_original_scale(train_std, ridge.beta);
      metrics.push_back({rep, "ridge", kNaN, lambda, ridge.dof,
                         mse_of(coef.intercept, coef.beta)});
    }
  }

  // Training-error curve of both component paths on the full dataset,
  // reported against the component count and the complexity estimate.
  StandardizedData full = standardize(raw);
  const int cap_full = effective_cap(raw, opt.m_max);
  PlsModel pls_full = fit_pls(full, cap_full);
  const int pcr_rank = static_cast<int>(fit_ols(full).rank);
  const int cap_curve = std::min({cap_full, pls_full.components(), pcr_rank});
  PcrModel pcr_full = fit_pcr(full, cap_curve);
  DofProfile pls_dof = dof_profile_krylov(full, pls_full, cap_curve);

  std::ostringstream curves;
  curves << "method,m,dof,train_mse\n";
  for (int m = 0; m <= cap_curve; ++m) {
    const double pls_mse =
        (raw.y - pls_full.fitted_path.col(m)).squaredNorm() / static_cast<double>(n);
    const std::string dof_cell = static_cast<std::size_t>(m) < pls_dof.valid_count()
                                     ? fmt(pls_dof.dof[static_cast<std::size_t>(m)])
                                     : std::string();
    curves << "pls," << m << "," << dof_cell << "," << fmt(pls_mse) << "\n";
  }
  for (int m = 0; m <= cap_curve; ++m) {
    const double pcr_mse =
        (raw.y - pcr_full.fitted_path.col(m)).squaredNorm() / static_cast<double>(n);
    curves << "pcr," << m << "," << fmt(pcr_full.dof(m)) << "," << fmt(pcr_mse) << "\n";
  }

  std::ostringstream table;
  table << "rep,method,chosen_m,lambda,chosen_dof,test_mse\n";
  for (const RepRow& row : metrics)
    table << row.rep << "," << row.method << "," << csv_num(row.chosen_m) << ","
          << csv_num(row.lambda) << "," << csv_num(row.chosen_dof) << ","
          << csv_num(row.test_mse) << "\n";

  const std::string metrics_path = opt.output + "_metrics.csv";
  const std::string curves_path = opt.output + "_curves.csv";
  write_text(metrics_path, table.str());
  write_text(curves_path, curves.str());

  json doc;
  doc["command"] = "compare";
  doc["input"] = opt.input;
  doc["target"] = opt.target;
  doc["reps"] = opt.reps;
  doc["train_size"] = opt.train_size;
  doc["test_size"] = test_size;
  doc["folds"] = opt.folds;
  doc["m_max"] = opt.m_max;
  doc["seed"] = opt.seed;
  doc["lambdas"] = lambdas;
  json methods = json::array();
  for (const std::string& name : {std::string("pls"), std::string("pcr"), std::string("ridge")}) {
    std::vector<double> mse, ms, dofs, ls;
    for (const RepRow& row : metrics) {
      if (row.method != name) continue;
      mse.push_back(row.test_mse);
      ms.push_back(row.chosen_m);
      dofs.push_back(row.chosen_dof);
      ls.push_back(row.lambda);
    }
    json entry;
    entry["method"] = name;
    entry["median_test_mse"] = num_or_null(median_finite(mse));
    entry["median_chosen_m"] = num_or_null(median_finite(ms));
    entry["median_chosen_dof"] = num_or_null(median_finite(dofs));
    if (name == "ridge") entry["median_lambda"] = num_or_null(median_finite(ls));
    methods.push_back(entry);
  }
  doc["methods"] = methods;
  doc["files"] = {{"metrics", metrics_path}, {"curves", curves_path}};
  std::cout << dump_json(doc);
  return 0;
}

// ----------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string config_file;
  std::string output = "simulate";
  std::vector<int> d_values;
  int reps = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int n_train = -1;
  int n_test = -1;
  double snr = -1.0;
  int m_max = -1;
  int folds = -1;
  int base_rows = -1;
  int base_dims = -1;
  bool schema = false;
};

std::string trim(const std::string& s) {
  const auto from = s.find_first_not_of(" \t\r");
  if (from == std::string::npos) return "";
  const auto to = s.find_last_not_of(" \t\r");
  return s.substr(from, to - from + 1);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty entry in list '" + text + "'");
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("not an integer: '" + item + "'");
    }
    if (used != item.size()) throw ConfigError("not an integer: '" + item + "'");
    values.push_back(value);
  }
  if (values.empty()) throw ConfigError("empty list '" + text + "'");
  return values;
}

// Key-value configuration file for the simulation sweep: `key = value` lines,
// '#' starts a comment line, keys match the command-line flags.
void apply_config_file(const std::string& path, SimulationConfig& config, int& base_rows,
                       int& base_dims) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "d" || key == "d_values") config.d_values = parse_int_list(value);
      else if (key == "reps") config.reps = std::stoi(value);
      else if (key == "seed") config.seed = std::stoull(value);
      else if (key == "n_train") config.n_train = std::stoi(value);
      else if (key == "n_test") config.n_test = std::stoi(value);
      else if (key == "snr") config.snr = std::stod(value);
      else if (key == "m_max") config.m_max = std::stoi(value);
      else if (key == "folds" || key == "cv_folds") config.cv_folds = std::stoi(value);
      else if (key == "base_rows") base_rows = std::stoi(value);
      else if (key == "base_dims") base_dims = std::stoi(value);
      else throw ConfigError("unknown config key '" + key + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("bad value for '" + key + "' at config line " + std::to_string(lineno));
    }
  }
}

int run_simulate(const SimulateOptions& opt) {
  if (opt.schema) {
    std::cout << cli::kSimulateSchema;
    return 0;
  }
  SimulationConfig config;
  int base_rows = -1;
  int base_dims = -1;
  if (!opt.config_file.empty()) apply_config_file(opt.config_file, config, base_rows, base_dims);

  // Flags override the file.
  if (!opt.d_values.empty()) config.d_values = opt.d_values;
  if (opt.reps >= 0) config.reps = opt.reps;
  if (opt.seed_set) config.seed = opt.seed;
  if (opt.n_train >= 0) config.n_train = opt.n_train;
  if (opt.n_test >= 0) config.n_test = opt.n_test;
  if (opt.snr >= 0.0) config.snr = opt.snr;
  if (opt.m_max >= 0) config.m_max = opt.m_max;
  if (opt.folds >= 0) config.cv_folds = opt.folds;
  if (opt.base_rows >= 0) base_rows = opt.base_rows;
  if (opt.base_dims >= 0) base_dims = opt.base_dims;

  if (base_rows < 0) base_rows = config.n_train + config.n_test;
  if (base_dims < 0) base_dims = 5;
  config.base_design = default_base_design(base_rows, base_dims, config.seed);

  SimulationReport report = run_simulation(config);

  std::ostringstream cells;
  cells << "d,rep,method,chosen_m,chosen_dof,sigma_ratio,norm_test_error\n";
  for (const SimulationCell& cell : report.cells)
    cells << cell.d << "," << cell.rep << "," << to_string(cell.method) << ","
          << cell.chosen_m << "," << csv_num(cell.chosen_dof) << ","
          << csv_num(cell.sigma_ratio) << "," << csv_num(cell.norm_test_error) << "\n";
  const std::string cells_path = opt.output + "_cells.csv";
  write_text(cells_path, cells.str());

  json doc;
  doc["command"] = "simulate";
  json cfg;
  cfg["d_values"] = config.d_values;
  cfg["n_train"] = config.n_train;
  cfg["n_test"] = config.n_test;
  cfg["snr"] = config.snr;
  cfg["reps"] = config.reps;
  cfg["seed"] = config.seed;
  cfg["m_max"] = config.m_max;
  cfg["cv_folds"] = config.cv_folds;
  cfg["base_rows"] = base_rows;
  cfg["base_dims"] = base_dims;
  doc["config"] = cfg;
  json cell_rows = json::array();
  for (const SimulationCell& cell : report.cells) {
    json row;
    row["d"] = cell.d;
    row["rep"] = cell.rep;
    row["method"] = to_string(cell.method);
    row["chosen_m"] = cell.chosen_m;
    row["chosen_dof"] = num_or_null(cell.chosen_dof);
    row["sigma_ratio"] = num_or_null(cell.sigma_ratio);
    row["norm_test_error"] = num_or_null(cell.norm_test_error);
    cell_rows.push_back(row);
  }
  doc["cells"] = cell_rows;
  json median_rows = json::array();
  for (const MedianRow& row : report.medians) {
    json entry;
    entry["d"] = row.d;
    entry["method"] = to_string(row.method);
    entry["norm_test_error"] = num_or_null(row.norm_test_error);
    entry["chosen_m"] = num_or_null(row.chosen_m);
    entry["chosen_dof"] = num_or_null(row.chosen_dof);
    entry["sigma_ratio"] = num_or_null(row.sigma_ratio);
    median_rows.push_back(entry);
  }
  doc["medians"] = median_rows;
  doc["files"] = {{"cells", cells_path}};
  write_text(opt.output + ".json", dump_json(doc));
  std::cerr << "wrote " << cells_path << " and " << opt.output << ".json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  threading::configure_from_env();

  CLI::App app{"Partial least squares regression with unbiased model complexity"};
  app.require_subcommand(1);
  app.fallthrough(false);
  int threads = 0;
  app.add_option("--threads", threads, "Worker thread count (default: PLSREG_THREADS or all)");

  FitOptions fit_opt;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit the projection path and write it out");
  fit_cmd->add_option("--input", fit_opt.input, "CSV file with a header row");
  fit_cmd->add_option("--target", fit_opt.target, "Response column name")->capture_default_str();
  fit_cmd->add_option("--m-max", fit_opt.m_max, "Largest component count")->capture_default_str();
  fit_cmd->add_option("--output", fit_opt.output, "Output file (default: stdout)");
  fit_cmd->add_option("--format", fit_opt.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  fit_cmd->add_flag("--json-schema", fit_opt.schema, "Print the JSON output schema and exit");

  DofOptions dof_opt;
  CLI::App* dof_cmd = app.add_subcommand("dof", "Per-component model complexity");
  dof_cmd->add_option("--input", dof_opt.input, "CSV file with a header row");
  dof_cmd->add_option("--target", dof_opt.target, "Response column name")->capture_default_str();
  dof_cmd->add_option("--m-max", dof_opt.m_max, "Largest component count")->capture_default_str();
  dof_cmd->add_option("--engine", dof_opt.engine, "lanczos, krylov, both, or naive")
      ->check(CLI::IsMember({"lanczos", "krylov", "both", "naive"}))
      ->capture_default_str();
  dof_cmd->add_option("--output", dof_opt.output, "Output file (default: stdout)");
  dof_cmd->add_option("--format", dof_opt.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  dof_cmd->add_flag("--json-schema", dof_opt.schema, "Print the JSON output schema and exit");

  SelectOptions select_opt;
  CLI::App* select_cmd = app.add_subcommand("select", "Choose the component count");
  select_cmd->add_option("--input", select_opt.input, "CSV file with a header row");
  select_cmd->add_option("--target", select_opt.target, "Response column name")
      ->capture_default_str();
  select_cmd->add_option("--m-max", select_opt.m_max, "Largest component count")
      ->capture_default_str();
  select_cmd->add_option("--method", select_opt.method, "cv, bic-lanczos, bic-krylov, bic-naive")
      ->check(CLI::IsMember({"cv", "bic-lanczos", "bic-krylov", "bic-naive"}))
      ->capture_default_str();
  select_cmd->add_option("--folds", select_opt.folds, "Cross-validation folds")
      ->capture_default_str();
  select_cmd->add_option("--seed", select_opt.seed, "Cross-validation shuffle seed")
      ->capture_default_str();
  select_cmd->add_option("--test", select_opt.test, "Holdout CSV for per-m prediction error");
  select_cmd->add_option("--output", select_opt.output, "Output file (default: stdout)");
  select_cmd->add_option("--format", select_opt.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  select_cmd->add_flag("--json-schema", select_opt.schema,
                       "Print the JSON output schema and exit");

  CompareOptions compare_opt;
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Repeated-split comparison against PCR and ridge");
  compare_cmd->add_option("--input", compare_opt.input, "CSV file with a header row");
  compare_cmd->add_option("--target", compare_opt.target, "Response column name")
      ->capture_default_str();
  compare_cmd->add_option("--m-max", compare_opt.m_max, "Largest component count")
      ->capture_default_str();
  compare_cmd->add_option("--reps", compare_opt.reps, "Number of random splits")
      ->capture_default_str();
  compare_cmd->add_option("--train-size", compare_opt.train_size, "Training rows per split")
      ->capture_default_str();
  compare_cmd->add_option("--test-size", compare_opt.test_size,
                          "Test rows per split (default: the rest)");
  compare_cmd->add_option("--folds", compare_opt.folds, "Cross-validation folds inside a split")
      ->capture_default_str();
  compare_cmd->add_option("--seed", compare_opt.seed, "Split shuffle seed")
      ->capture_default_str();
  compare_cmd->add_option("--lambdas", compare_opt.lambdas,
                          "Ridge penalty grid (default: logarithmic 1e-4..1e4)")
      ->delimiter(',');
  compare_cmd->add_option("--output", compare_opt.output, "Output file prefix")
      ->capture_default_str();
  compare_cmd->add_flag("--json-schema", compare_opt.schema,
                        "Print the JSON output schema and exit");

  SimulateOptions sim_opt;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Factorial sweep over basis sizes");
  sim_cmd->add_option("--config", sim_opt.config_file, "key = value configuration file");
  sim_cmd->add_option("--d", sim_opt.d_values, "Basis sizes (comma separated)")->delimiter(',');
  sim_cmd->add_option("--reps", sim_opt.reps, "Repetitions per basis size");
  CLI::Option* seed_opt = sim_cmd->add_option("--seed", sim_opt.seed, "Master seed");
  sim_cmd->add_option("--n-train", sim_opt.n_train, "Training rows");
  sim_cmd->add_option("--n-test", sim_opt.n_test, "Test rows");
  sim_cmd->add_option("--snr", sim_opt.snr, "Signal-to-noise ratio");
  sim_cmd->add_option("--m-max", sim_opt.m_max, "Largest component count");
  sim_cmd->add_option("--folds", sim_opt.folds, "Cross-validation folds");
  sim_cmd->add_option("--base-rows", sim_opt.base_rows, "Input-site pool size");
  sim_cmd->add_option("--base-dims", sim_opt.base_dims, "Input-site dimension");
  sim_cmd->add_option("--output", sim_opt.output, "Output file prefix")->capture_default_str();
  sim_cmd->add_flag("--json-schema", sim_opt.schema, "Print the JSON output schema and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  sim_opt.seed_set = seed_opt->count() > 0;
  if (threads > 0) threading::set_max_threads(threads);

  try {
    if (app.got_subcommand(fit_cmd)) return run_fit(fit_opt);
    if (app.got_subcommand(dof_cmd)) return run_dof(dof_opt);
    if (app.got_subcommand(select_cmd)) return run_select(select_opt);
    if (app.got_subcommand(compare_cmd)) return run_compare(compare_opt);
    if (app.got_subcommand(sim_cmd)) return run_simulate(sim_opt);
  } catch (const InputError& e) {
    std::cerr << "error: " << error_name(e) << ": " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << error_name(e) << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << error_name(e) << ": " << e.what() << "\n";
    return 3;
  }
  return 2;
}
