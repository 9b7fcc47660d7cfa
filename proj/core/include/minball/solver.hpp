#pragma once

#include "minball/path.hpp"
#include "minball/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace minball {

struct SolveOptions {
  Tolerances tol;
  int max_iterations = 0;  // 0 selects 100·m
  bool trace = true;
  std::optional<Vec> initial_point;                  // primal start
  std::optional<std::pair<int, int>> initial_pair;   // dual start
};

enum class StepEvent { start, entered, reached_affine_hull, left, facet_exit, optimal };

const char* to_string(StepEvent event);

struct TraceEntry {
  int iteration = 0;
  double z = 0.0;
  int active_size = 0;
  std::string path;  // ray / hyperbola / ellipse / parabola, empty for updates
  double step = 0.0;
  StepEvent event = StepEvent::start;
  int index = -1;  // ball entering or leaving
};

struct SolveResult {
  std::string algorithm;
  CoveringBall ball;
  ActiveSet support;  // indices into the instance given to the solver
  Vec weights;        // convex weights π over the support
  int iterations = 0;
  std::vector<TraceEntry> trace;
};

int default_iteration_cap(const Instance& inst, const SolveOptions& opt);

}  // namespace minball
