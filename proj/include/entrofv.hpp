#pragma once

#include "entrofv/core.hpp"
#include "entrofv/mesh.hpp"
#include "entrofv/mesh_io.hpp"
#include "entrofv/linalg.hpp"
#include "entrofv/bscheme.hpp"
#include "entrofv/transport.hpp"
#include "entrofv/fp_scheme.hpp"
#include "entrofv/pme_scheme.hpp"
#include "entrofv/dd_scheme.hpp"
#include "entrofv/solvers.hpp"
#include "entrofv/entropy.hpp"
#include "entrofv/runs.hpp"
