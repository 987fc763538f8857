#include "noether/scenario.hpp"

#include <algorithm>

namespace noether {

const std::vector<BuiltinScenario>& list_builtin_scenarios() {
  static const std::vector<BuiltinScenario> catalog = {
      {"free-dilation", "free particle, Schrodinger dilation (1,1,1)", R"(name = "free-dilation"
t_end = 3.0
tol = 1e-10
seed = 1
checks = ["charge", "symmetry_residual", "mapping", "generator", "bargmann"]
lambda_values = [0.5, 2.0]

[potential]
kind = "zero"

[initial]
q = [1.0, 0.0]
qdot = [2.0, 0.5]

[scaling]
k = 0.0
a = 1.0
)"},
      {"inverse-square", "repulsive inverse-square potential, law (1,2,0)", R"(name = "inverse-square"
t_end = 3.0
tol = 1e-10
grid_intervals = 2000
seed = 2
checks = ["charge", "symmetry_residual", "mapping", "generator", "bargmann"]
lambda_values = [1.5, 2.0]

[potential]
kind = "inverse_square"
coupling = 0.5

[initial]
q = [1.0, 0.0]
qdot = [0.1, 0.9]

[scaling]
k = -2.0
a = 1.0
)"},
      {"kepler-rescale", "bound Kepler ellipse, law (2,3,1), third-law rescaling", R"(name = "kepler-rescale"
t_end = 18.75
tol = 1e-12
grid_intervals = 2000
seed = 3
checks = ["charge", "virial", "symmetry_residual", "mapping", "generator", "bargmann"]
lambda_values = [2.0, 1.7]

[potential]
kind = "kepler"
coupling = 1.0

[initial]
q = [1.0, 0.0]
qdot = [0.0, 1.2]

[scaling]
k = -1.0
a = 2.0
)"},
      {"galilei-drop", "uniform gravitational field, law (2,1,3)", R"(name = "galilei-drop"
t_end = 3.0
tol = 1e-10
seed = 4
checks = ["charge", "symmetry_residual", "mapping", "generator", "bargmann"]
lambda_values = [0.5, 2.0]

[potential]
kind = "linear_force"
coupling = 9.81

[initial]
q = [0.0]
qdot = [0.0]

[scaling]
a = 2.0
b = 1.0
c = 3.0
)"},
      {"oscillator-rescale", "isotropic harmonic oscillator, law (1,0,2)", R"(name = "oscillator-rescale"
t_end = 20.0
tol = 1e-12
grid_intervals = 2000
seed = 5
checks = ["charge", "virial", "symmetry_residual", "mapping", "generator", "bargmann"]
lambda_values = [3.0]

[potential]
kind = "harmonic"
omega = 1.0

[initial]
q = [1.0, 0.0]
qdot = [0.0, 0.7]

[scaling]
k = 2.0
)"},
      {"oscillator-1d-homothety", "1d oscillator lifted to 3d Bargmann space, homothety", R"(name = "oscillator-1d-homothety"
t_end = 20.0
tol = 1e-12
grid_intervals = 2000
seed = 6
checks = ["charge", "virial", "bargmann", "homothety"]
lambda_values = [2.0, 0.5]

[potential]
kind = "harmonic"
omega = 1.0

[initial]
q = [1.0]
qdot = [0.7]

[scaling]
k = 2.0

[bargmann]
s0 = 0.0
)"},
      {"brdicka-wave", "Brdicka pp-wave (traceless, vacuum), homothety charge", R"(name = "brdicka-wave"
t_end = 3.0
tol = 1e-13
grid_intervals = 3000
seed = 7
checks = ["charge", "generator", "bargmann", "homothety"]
lambda_values = [2.0]

[ppwave]
kind = "brdicka"
omega = 1.0

[initial]
q = [1.0, 1.0]
qdot = [0.0, 0.0]

[scaling]
a = 1.0
b = 0.0
c = 2.0

[bargmann]
s0 = 0.0
)"},
      {"isotropic-ppwave", "isotropic oscillator pp-wave (non-vacuum), homothety charge", R"(name = "isotropic-ppwave"
t_end = 20.0
tol = 1e-12
grid_intervals = 2000
seed = 8
checks = ["charge", "virial", "generator", "bargmann", "homothety"]
lambda_values = [2.0]

[ppwave]
kind = "isotropic"
omega = 1.0

[initial]
q = [1.0, 0.0]
qdot = [0.0, 1.0]

[scaling]
a = 1.0
b = 0.0
c = 2.0

[bargmann]
s0 = 0.0
)"},
  };
  return catalog;
}

Scenario builtin_scenario(const std::string& name) {
  const auto& catalog = list_builtin_scenarios();
  const auto it = std::find_if(catalog.begin(), catalog.end(), [&](const auto& b) { return b.name == name; });
  if (it == catalog.end()) throw ConfigError("unknown built-in scenario '" + name + "'");
  return parse_scenario(it->toml, false, "builtin:" + name);
}

}  // namespace noether
