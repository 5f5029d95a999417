#include "edgecorr/correction.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "edgecorr/errors.hpp"
#include "edgecorr/inference.hpp"

namespace edgecorr {
namespace {

struct EdgeJoint {
  double y = 0.0;
  double mi = 0.0;
};

EdgeJoint edge_joint(const ParametrizedModel& model, std::size_t edge) {
  const EquivalenceEdge& e = model.edge(edge);
  const VarId keep[] = {e.i, e.j};
  const JointTable joint = marginal(model.net_prime(), keep, &model.order_for(keep));
  const auto d = static_cast<std::size_t>(e.card);
  EdgeJoint out;
  for (std::size_t x = 0; x < d; ++x) {
    double pj = 0.0;
    for (std::size_t xi = 0; xi < d; ++xi) pj += joint.probs[xi * d + x];
    if (pj <= 0.0)
      throw ZeroConditional("Pr'(x_j) is zero for value " + std::to_string(x) + " of variable " +
                            std::to_string(e.j));
    out.y += joint.probs[x * d + x] / pj;
  }
  out.mi = mutual_information(joint, 1);
  return out;
}

double expect_log(const std::vector<double>& belief, const Factor& psi, const char* what) {
  double u = 0.0;
  for (std::size_t x = 0; x < belief.size(); ++x) {
    if (belief[x] <= 0.0) continue;
    const double v = psi.table()[x];
    if (v <= 0.0) throw SupportError(std::string("belief has mass where the ") + what + " potential is zero");
    u += belief[x] * (std::log(v) + psi.log_scale());
  }
  return u;
}

double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double q : p)
    if (q > 0.0) h -= q * std::log(q);
  return h;
}

}  // namespace

const CorrectionTerms& CorrectionReport::term(std::size_t edge) const {
  for (const auto& t : terms)
    if (t.edge == edge) return t;
  throw ScopeError("no correction term for edge " + std::to_string(edge));
}

double z_term(const EdgeParameters& params) {
  double z = 0.0;
  for (std::size_t x = 0; x < params.theta_i.size(); ++x) z += params.theta_i[x] * params.theta_j[x];
  return z;
}

double y_term(const ParametrizedModel& model, std::size_t edge) {
  model.parameters(edge);  // throws unless deleted
  return edge_joint(model, edge).y;
}

CorrectionReport correct(const ParametrizedModel& model) {
  CorrectionReport r;
  r.log_Z_prime = log_partition(model.net_prime(), &model.order_for({}));
  r.n_deleted = model.deleted().size();
  double sum_log_z = 0.0, sum_log_y = 0.0;
  for (std::size_t e : model.deleted()) {
    CorrectionTerms t;
    t.edge = e;
    t.equiv = model.edge(e);
    t.log_z = std::log(z_term(model.parameters(e)));
    const EdgeJoint j = edge_joint(model, e);
    t.log_y = std::log(j.y);
    t.mi = j.mi;
    sum_log_z += t.log_z;
    sum_log_y += t.log_y;
    r.terms.push_back(t);
  }
  r.log_Z_ecz = r.log_Z_prime - sum_log_z;
  r.log_Z_ecg = r.log_Z_ecz + sum_log_y;
  r.partial_order = model.deleted();
  r.partial_curve = partial_curve(r, r.partial_order);
  const double n = static_cast<double>(r.n_deleted);
  double sum_recovered = 0.0;
  for (const auto& t : r.terms) sum_recovered += r.log_Z_prime + t.log_y - t.log_z;
  r.dual_energy = (n - 1.0) * r.log_Z_prime - sum_recovered;
  return r;
}

double partial_ec_g(const CorrectionReport& report, std::span<const std::size_t> order, std::size_t k) {
  if (k > order.size()) throw std::invalid_argument("partial correction prefix longer than the order");
  double v = report.log_Z_ecz;
  for (std::size_t m = 0; m < k; ++m) v += report.term(order[m]).log_y;
  return v;
}

std::vector<double> partial_curve(const CorrectionReport& report, std::span<const std::size_t> order) {
  std::vector<double> curve{report.log_Z_ecz};
  for (std::size_t e : order) curve.push_back(curve.back() + report.term(e).log_y);
  return curve;
}

double single_edge_recovered_logZ(const CorrectionReport& report, std::size_t edge) {
  const CorrectionTerms& t = report.term(edge);
  return report.log_Z_prime + t.log_y - t.log_z;
}

BetheBeliefs collect_beliefs(const ParametrizedModel& model) {
  const ExtendedModel& base = model.base();
  BetheBeliefs b;
  for (std::size_t v = 0; v < base.num_original_variables; ++v) {
    const VarId keep[] = {static_cast<VarId>(v)};
    b.node.push_back(marginal(model.net_prime(), keep, &model.order_for(keep)).probs);
  }
  for (const Factor& f : base.net.factors()) {
    if (f.arity() != 2) {
      b.edge.emplace_back();
      continue;
    }
    b.edge.emplace_back(marginal(model.net_prime(), f.scope(), &model.order_for(f.scope())).probs);
  }
  return b;
}

double bethe_free_energy(const FactorNetwork& original, const BetheBeliefs& beliefs) {
  if (beliefs.node.size() != original.num_variables() || beliefs.edge.size() != original.num_factors())
    throw ShapeError("beliefs do not cover the network");
  std::vector<int> degree(original.num_variables(), 0);
  double energy = 0.0, ent = 0.0;
  for (std::size_t f = 0; f < original.num_factors(); ++f) {
    const Factor& psi = original.factor(f);
    switch (psi.arity()) {
      case 0:
        energy -= expect_log({1.0}, psi, "constant");
        break;
      case 1:
        energy -= expect_log(beliefs.node[static_cast<std::size_t>(psi.scope()[0])], psi, "node");
        break;
      case 2: {
        if (!beliefs.edge[f] || beliefs.edge[f]->size() != psi.size())
          throw ShapeError("missing edge belief for factor " + std::to_string(f));
        energy -= expect_log(*beliefs.edge[f], psi, "edge");
        ent += entropy(*beliefs.edge[f]);
        for (VarId v : psi.scope()) ++degree[static_cast<std::size_t>(v)];
        break;
      }
      default:
        throw ShapeError("Bethe free energy needs a pairwise network; factor " + std::to_string(f) + " has arity " +
                         std::to_string(psi.arity()));
    }
  }
  for (std::size_t v = 0; v < original.num_variables(); ++v)
    ent -= (degree[v] - 1) * entropy(beliefs.node[v]);
  return energy - ent;
}

}  // namespace edgecorr
