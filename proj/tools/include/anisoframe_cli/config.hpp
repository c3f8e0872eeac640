#ifndef ANISOFRAME_CLI_CONFIG_HPP
#define ANISOFRAME_CLI_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "anisoframe/certify.hpp"
#include "anisoframe/wavelets.hpp"
#include "json.hpp"

namespace anisoframe::cli {

struct CellSpec {
  std::string kind = "annulus";
  double inner = 0.25;
  double outer = 1.0;
  double shrink = 0.95;
};

// Fully resolved run configuration. Parsing is strict: unknown keys are
// rejected so a typo cannot silently fall back to a default.
struct RunConfig {
  std::vector<std::vector<double>> matrix;
  std::string kind = "homogeneous";
  int s = 0;
  double p = 2.0, q = 2.0, p0 = 1.0, q0 = 1.0, epsilon = 1.0;
  double delta = 0.25;
  std::vector<int> grid;
  std::vector<double> period;
  int scale_min = 0, scale_max = 0;

  std::optional<double> lambda_minus, lambda_plus;
  double margin = 0.05;

  std::optional<CellSpec> base_cell, low_cell;

  std::string prototype_family = "annular-hermite-gauss";
  std::optional<int> prototype_order;

  std::string cert_case = "homo-frame";
  std::string convention = "stated";
  double master_c = 1.0;
  bool master_c_supplied = false;
  std::optional<double> cert_L, cert_N, cert_K;
  double exponent_margin = 0.5;
  int quad_grid = 64;
  int truncation = 64;
  int nij_reach = 2;

  int probe_grid = 512;
  int probe_count = 10000;
  unsigned seed = 20240901u;

  std::vector<double> roundtrip_deltas = {0.5, 0.25, 0.125};
  int trials = 30;
  bool parseval = true;

  int threads = 1;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_json(const nlohmann::json& j);

// The resolved configuration (defaults expanded) embedded into every report
// so a run is reproducible from the report alone.
nlohmann::ordered_json resolved_config(const RunConfig& cfg);

// Construction helpers shared by the commands.
ExpansiveMatrix config_matrix(const RunConfig& cfg);
BaseCell config_base_cell(const RunConfig& cfg, const ExpansiveMatrix& m);
BaseCell config_low_cell(const RunConfig& cfg, const ExpansiveMatrix& m);
Cover config_cover(const RunConfig& cfg, const ExpansiveMatrix& m);
WaveletSystem config_system(const RunConfig& cfg, const ExpansiveMatrix& m,
                            bool parseval_mode);
CertifyRequest config_certify_request(const RunConfig& cfg,
                                      const ExpansiveMatrix& m);

}  // namespace anisoframe::cli

#endif
