#include <cstdio>
#include <exception>

#include "qinst/json_io.hpp"
#include "qinst/sdp.hpp"

// Reads {"problem": ..., "config": ...} from argv[1], solves, writes the
// solution JSON to argv[2].
int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s <request.json> <response.json>\n", argv[0]);
    return 2;
  }
  try {
    nlohmann::json request = qinst::load_json_file(argv[1]);
    qinst::sdp::SdpProblem problem = qinst::sdp::SdpProblem::from_json(request.at("problem"));
    qinst::sdp::SolverConfig config;
    if (request.contains("config"))
      config = qinst::sdp::config_from_json(request.at("config"));
    qinst::sdp::InteriorPointSolver solver;
    qinst::sdp::SdpSolution solution = solver.solve(problem, config);
    qinst::save_json_file(argv[2], solution.to_json());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
