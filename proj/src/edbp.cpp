#include "edgecorr/edbp.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "edgecorr/errors.hpp"

namespace edgecorr {

struct ParametrizedModel::OrderCache {
  std::mutex mutex;
  std::map<std::vector<VarId>, EliminationOrder> orders;
};

namespace {

std::vector<double> normalized(const std::vector<double>& v, const char* what) {
  double total = 0.0;
  for (double x : v) total += x;
  if (!(total > 0.0) || !std::isfinite(total)) throw DegenerateUpdate(std::string(what) + " is all zero");
  std::vector<double> out(v);
  for (double& x : out) x /= total;
  return out;
}

void check_theta(const std::vector<double>& theta, int card) {
  if (static_cast<int>(theta.size()) != card) throw ShapeError("edge parameter has the wrong length");
  bool positive = false;
  for (double x : theta) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ShapeError("edge parameters must be finite and nonnegative");
    positive = positive || x > 0.0;
  }
  if (!positive) throw ShapeError("edge parameter vector is all zero");
}

}  // namespace

ParametrizedModel::ParametrizedModel(ExtendedModel base, std::vector<std::size_t> deleted)
    : base_(std::make_shared<const ExtendedModel>(std::move(base))), deleted_(std::move(deleted)) {
  std::sort(deleted_.begin(), deleted_.end());
  if (std::adjacent_find(deleted_.begin(), deleted_.end()) != deleted_.end())
    throw ScopeError("equivalence edge deleted twice");
  for (std::size_t e : deleted_) {
    if (e >= base_->equiv_edges.size()) throw ScopeError("unknown equivalence edge " + std::to_string(e));
    const EquivalenceEdge& ee = base_->equiv_edges[e];
    const std::vector<double> uniform(static_cast<std::size_t>(ee.card), 1.0 / ee.card);
    params_[e] = EdgeParameters{ee, uniform, uniform};
  }
  build();
}

void ParametrizedModel::build() {
  net_prime_ = base_->net;
  theta_ids_.clear();
  for (std::size_t e = 0; e < base_->equiv_edges.size(); ++e) {
    const EquivalenceEdge& ee = base_->equiv_edges[e];
    auto it = params_.find(e);
    if (it == params_.end()) {
      net_prime_.add_factor(Factor::equivalence(ee.i, ee.j, ee.card));
    } else {
      const std::size_t fi = net_prime_.add_factor(Factor::unary(ee.i, it->second.theta_i));
      const std::size_t fj = net_prime_.add_factor(Factor::unary(ee.j, it->second.theta_j));
      theta_ids_[e] = {fi, fj};
    }
  }
  cache_ = std::make_shared<OrderCache>();
}

bool ParametrizedModel::is_deleted(std::size_t edge) const { return params_.count(edge) != 0; }

const EdgeParameters& ParametrizedModel::parameters(std::size_t edge) const {
  auto it = params_.find(edge);
  if (it == params_.end()) throw ScopeError("equivalence edge " + std::to_string(edge) + " is not deleted");
  return it->second;
}

std::pair<std::size_t, std::size_t> ParametrizedModel::theta_factor(std::size_t edge) const {
  auto it = theta_ids_.find(edge);
  if (it == theta_ids_.end()) throw ScopeError("equivalence edge " + std::to_string(edge) + " is not deleted");
  return it->second;
}

void ParametrizedModel::set_parameters(std::size_t edge, std::vector<double> theta_i, std::vector<double> theta_j) {
  auto it = params_.find(edge);
  if (it == params_.end()) throw ScopeError("equivalence edge " + std::to_string(edge) + " is not deleted");
  check_theta(theta_i, it->second.edge.card);
  check_theta(theta_j, it->second.edge.card);
  const auto [fi, fj] = theta_ids_.at(edge);
  net_prime_.replace_factor(fi, Factor::unary(it->second.edge.i, theta_i));
  net_prime_.replace_factor(fj, Factor::unary(it->second.edge.j, theta_j));
  it->second.theta_i = std::move(theta_i);
  it->second.theta_j = std::move(theta_j);
}

const EliminationOrder& ParametrizedModel::order_for(std::span<const VarId> keep) const {
  std::vector<VarId> key(keep.begin(), keep.end());
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto it = cache_->orders.find(key);
  if (it == cache_->orders.end()) it = cache_->orders.emplace(key, min_fill_order(net_prime_, keep)).first;
  return it->second;
}

ParametrizedModel ParametrizedModel::with_recovered(std::span<const std::size_t> edges) const {
  ParametrizedModel out(*this);
  for (std::size_t e : edges) {
    if (!out.params_.erase(e)) throw ScopeError("equivalence edge " + std::to_string(e) + " is not deleted");
    out.deleted_.erase(std::find(out.deleted_.begin(), out.deleted_.end(), e));
  }
  out.build();
  return out;
}

ParametrizedModel init_parameters(const ExtendedModel& model, std::vector<std::size_t> deleted) {
  return ParametrizedModel(model, std::move(deleted));
}

EdgeParameters update_edge(const ParametrizedModel& model, std::size_t edge) {
  const EdgeParameters& cur = model.parameters(edge);
  const VarId ki[] = {cur.edge.i};
  const VarId kj[] = {cur.edge.j};
  const Factor dj = marginal_excluding_factor(model.net_prime(), model.theta_j_factor(edge), cur.edge.j,
                                              &model.order_for(kj));
  const Factor di = marginal_excluding_factor(model.net_prime(), model.theta_i_factor(edge), cur.edge.i,
                                              &model.order_for(ki));
  return EdgeParameters{cur.edge, normalized(dj.table(), "derivative with respect to theta_j"),
                        normalized(di.table(), "derivative with respect to theta_i")};
}

namespace {

double blend(EdgeParameters& next, const EdgeParameters& old, double damping) {
  if (damping > 0.0) {
    const auto oi = normalized(old.theta_i, "theta_i");
    const auto oj = normalized(old.theta_j, "theta_j");
    for (std::size_t x = 0; x < oi.size(); ++x) {
      next.theta_i[x] = damping * oi[x] + (1.0 - damping) * next.theta_i[x];
      next.theta_j[x] = damping * oj[x] + (1.0 - damping) * next.theta_j[x];
    }
  }
  double r = 0.0;
  for (std::size_t x = 0; x < next.theta_i.size(); ++x) {
    r = std::max(r, std::abs(next.theta_i[x] - old.theta_i[x]));
    r = std::max(r, std::abs(next.theta_j[x] - old.theta_j[x]));
  }
  return r;
}

}  // namespace

std::pair<ParametrizedModel, ConvergenceReport> edbp_iterate(ParametrizedModel model, const EdbpConfig& config) {
  if (!(config.tolerance > 0.0)) throw std::invalid_argument("ED-BP tolerance must be positive");
  if (!(config.damping >= 0.0 && config.damping < 1.0)) throw std::invalid_argument("damping must lie in [0, 1)");
  ConvergenceReport report;
  if (model.deleted().empty()) {
    report.converged = true;
    return {std::move(model), report};
  }
  const std::vector<std::size_t> edges = model.deleted();
  for (int it = 1; it <= config.max_iters; ++it) {
    double residual = 0.0;
    if (config.schedule == Schedule::sequential) {
      for (std::size_t e : edges) {
        EdgeParameters next = update_edge(model, e);
        residual = std::max(residual, blend(next, model.parameters(e), config.damping));
        model.set_parameters(e, std::move(next.theta_i), std::move(next.theta_j));
      }
    } else {
      std::vector<EdgeParameters> batch;
      batch.reserve(edges.size());
      for (std::size_t e : edges) {
        batch.push_back(update_edge(model, e));
        residual = std::max(residual, blend(batch.back(), model.parameters(e), config.damping));
      }
      for (std::size_t k = 0; k < edges.size(); ++k)
        model.set_parameters(edges[k], std::move(batch[k].theta_i), std::move(batch[k].theta_j));
    }
    report.iterations = it;
    report.final_residual = residual;
    if (residual < config.tolerance) {
      report.converged = true;
      break;
    }
  }
  return {std::move(model), report};
}

double fixed_point_check(const ParametrizedModel& model) {
  double worst = 0.0;
  for (std::size_t e : model.deleted()) {
    const EdgeParameters& p = model.parameters(e);
    const VarId ki[] = {p.edge.i};
    const VarId kj[] = {p.edge.j};
    const JointTable mi = marginal(model.net_prime(), ki, &model.order_for(ki));
    const JointTable mj = marginal(model.net_prime(), kj, &model.order_for(kj));
    double z = 0.0;
    for (std::size_t x = 0; x < p.theta_i.size(); ++x) z += p.theta_i[x] * p.theta_j[x];
    for (std::size_t x = 0; x < p.theta_i.size(); ++x) {
      worst = std::max(worst, std::abs(mi.probs[x] - p.theta_i[x] * p.theta_j[x] / z));
      worst = std::max(worst, std::abs(mi.probs[x] - mj.probs[x]));
    }
  }
  return worst;
}

}  // namespace edgecorr
