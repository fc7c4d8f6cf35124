#include "lindyna/snapshot.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lindyna/errors.hpp"

namespace lindyna {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

[[noreturn]] void bad(const std::string& what) { throw IoError("snapshot parse error: " + what); }

}  // namespace

void save_model(const LinearModel& m, std::ostream& out) {
  out << "linmodel v1\n";
  out << "n " << m.dim() << "\n";
  out << "eps " << fmt(m.drop_tolerance()) << "\n";
  for (int i = 0; i < m.dim(); ++i)
    if (m.b(i) != 0.0) out << "b " << i << " " << fmt(m.b(i)) << "\n";
  for (int i = 0; i < m.dim(); ++i)
    for (const Entry& e : m.row_entries(i))
      out << "F " << i << " " << e.index << " " << fmt(e.value) << "\n";
  if (!out) throw IoError("save_model: write failure");
}

void save_model(const LinearModel& m, const std::string& path) {
  auto out = open_out(path);
  save_model(m, out);
}

LinearModel load_model(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header != "linmodel v1") bad("missing 'linmodel v1' header");
  std::string key;
  int n = 0;
  double eps = 0.0;
  if (!(in >> key >> n) || key != "n" || n <= 0) bad("bad dimension line");
  if (!(in >> key >> eps) || key != "eps") bad("bad drop-tolerance line");
  LinearModel m(n, eps);
  while (in >> key) {
    if (key == "b") {
      int i;
      double v;
      if (!(in >> i >> v)) bad("bad b entry");
      m.set_b(i, v);
    } else if (key == "F") {
      int i, j;
      double v;
      if (!(in >> i >> j >> v)) bad("bad F entry");
      m.set_entry(i, j, v);
    } else {
      bad("unknown record '" + key + "'");
    }
  }
  return m;
}

LinearModel load_model(const std::string& path) {
  auto in = open_in(path);
  return load_model(in);
}

void save_planner(const Theta& theta, const SweepQueue& queue, const std::string& model_ref,
                  std::ostream& out) {
  out << "planner v1\n";
  out << "n " << theta.dim() << "\n";
  out << "model_ref " << model_ref << "\n";
  for (int i = 0; i < theta.dim(); ++i)
    if (theta[i] != 0.0) out << "theta " << i << " " << fmt(theta[i]) << "\n";
  for (const auto& [i, prio] : queue.entries()) out << "queue " << i << " " << fmt(prio) << "\n";
  if (!out) throw IoError("save_planner: write failure");
}

void save_planner(const Theta& theta, const SweepQueue& queue, const std::string& model_ref,
                  const std::string& path) {
  auto out = open_out(path);
  save_planner(theta, queue, model_ref, out);
}

PlannerSnapshot load_planner(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header != "planner v1") bad("missing 'planner v1' header");
  PlannerSnapshot snap;
  std::string key;
  if (!(in >> key >> snap.dim) || key != "n" || snap.dim <= 0) bad("bad dimension line");
  if (!(in >> key >> snap.model_ref) || key != "model_ref") bad("bad model_ref line");
  snap.theta = Theta(snap.dim);
  while (in >> key) {
    if (key == "theta") {
      int i;
      double v;
      if (!(in >> i >> v)) bad("bad theta entry");
      if (i < 0 || i >= snap.dim) bad("theta index out of range");
      snap.theta[i] = v;
    } else if (key == "queue") {
      int i;
      double prio;
      if (!(in >> i >> prio)) bad("bad queue entry");
      snap.queue.emplace_back(i, prio);
    } else {
      bad("unknown record '" + key + "'");
    }
  }
  return snap;
}

PlannerSnapshot load_planner(const std::string& path) {
  auto in = open_in(path);
  return load_planner(in);
}

}  // namespace lindyna
