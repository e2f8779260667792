#pragma once

// Umbrella header: congestion networks, equilibria, worst-case analysis under
// bounded rationality, and public-information design on top of it.

#include "errors.hpp"
#include "polynomial.hpp"
#include "shortest_path.hpp"
#include "network.hpp"
#include "equilibrium.hpp"
#include "worst_case.hpp"
#include "stochastic.hpp"
#include "persuasion.hpp"
#include "topologies.hpp"
#include "json_io.hpp"
#include "reproduce.hpp"
