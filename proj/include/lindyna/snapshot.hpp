#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lindyna/model.hpp"
#include "lindyna/sweep_queue.hpp"
#include "lindyna/theta.hpp"

namespace lindyna {

// Text snapshot formats. Lines are space-separated, values printed with 17
// significant digits so doubles round-trip exactly, rows sorted for diffing.
//
//   linmodel v1          planner v1
//   n <dim>              n <dim>
//   eps <drop_tol>       model_ref <string>
//   b <i> <value>...     theta <i> <value>...
//   F <i> <j> <value>... queue <i> <priority>...

void save_model(const LinearModel& m, std::ostream& out);
void save_model(const LinearModel& m, const std::string& path);
LinearModel load_model(std::istream& in);
LinearModel load_model(const std::string& path);

struct PlannerSnapshot {
  int dim = 0;
  std::string model_ref;  // path of the companion model snapshot
  Theta theta;
  std::vector<std::pair<int, double>> queue;  // sorted by index
};

void save_planner(const Theta& theta, const SweepQueue& queue, const std::string& model_ref,
                  std::ostream& out);
void save_planner(const Theta& theta, const SweepQueue& queue, const std::string& model_ref,
                  const std::string& path);
PlannerSnapshot load_planner(std::istream& in);
PlannerSnapshot load_planner(const std::string& path);

}  // namespace lindyna
