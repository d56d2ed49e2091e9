#include "laxoc/control_image.hpp"

namespace laxoc {

ConvexSetPtr make_scaled_box_hull(int agents, double l1, double u1, double u2) {
  if (u1 >= 0.0 || l1 > u1) throw std::invalid_argument("scaled box hull: need l1 <= u1 < 0");
  const int dim = 2 * agents;
  std::vector<std::pair<VectorXd, double>> rows;
  auto row = [&](const VectorXd& g, double h) { rows.emplace_back(g, h); };

  for (int r1 = 0; r1 < agents; ++r1) {
    VectorXd g = VectorXd::Zero(dim);
    g[2 * r1] = -1.0;
    row(g, -l1);  // l1 <= b1
    g.setZero();
    g[2 * r1 + 1] = 1.0;
    row(g, u2);  // b2 <= u2
    g.setZero();
    g[2 * r1 + 1] = -1.0;
    row(g, u2);  // -b2 <= u2
  }
  const double lo_ratio = l1 / u1;  // >= 1
  const double hi_ratio = u1 / l1;  // <= 1
  const double y_ratio = u2 / (-u1);
  for (int r1 = 0; r1 < agents; ++r1) {
    for (int r2 = 0; r2 < agents; ++r2) {
      VectorXd g = VectorXd::Zero(dim);
      g[2 * r1] = -1.0;
      g[2 * r2] += lo_ratio;
      row(g, 0.0);  // b1^{r1} >= (l1/u1) b1^{r2}
      g.setZero();
      g[2 * r1] = 1.0;
      g[2 * r2] -= hi_ratio;
      row(g, 0.0);  // b1^{r1} <= (u1/l1) b1^{r2}
      g.setZero();
      g[2 * r1 + 1] = 1.0;
      g[2 * r2] += y_ratio;
      row(g, 0.0);  // b2^{r1} <= y_ratio * (-b1^{r2})
      g.setZero();
      g[2 * r1 + 1] = -1.0;
      g[2 * r2] += y_ratio;
      row(g, 0.0);  // -b2^{r1} <= y_ratio * (-b1^{r2})
    }
  }

  MatrixXd G(rows.size(), dim);
  VectorXd h(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    G.row(i) = rows[i].first.transpose();
    h[i] = rows[i].second;
  }
  auto set = std::make_shared<HalfspaceSet>(std::move(G), std::move(h));

  // Support of co({0} u boxes) = max{0, sum of per-agent box supports}.
  BoxSet agent_box((VectorXd(2) << l1, -u2).finished(), (VectorXd(2) << u1, u2).finished());
  set->set_support_fn([agents, agent_box, dim](const VectorXd& c) {
    VectorXd arg = VectorXd::Zero(dim);
    double val = 0.0;
    for (int r = 0; r < agents; ++r) {
      auto [v, a] = agent_box.support(c.segment(2 * r, 2));
      val += v;
      arg.segment(2 * r, 2) = a;
    }
    if (val <= 0.0) return std::make_pair(0.0, VectorXd(VectorXd::Zero(dim)));
    return std::make_pair(val, arg);
  });
  return set;
}

}  // namespace laxoc
