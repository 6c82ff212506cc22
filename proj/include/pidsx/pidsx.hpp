#pragma once

#include "pidsx/calculus.hpp"
#include "pidsx/check.hpp"
#include "pidsx/conditioning.hpp"
#include "pidsx/global.hpp"
#include "pidsx/integration.hpp"
#include "pidsx/lattice.hpp"
#include "pidsx/model.hpp"
#include "pidsx/oracles.hpp"
#include "pidsx/pointwise.hpp"
#include "pidsx/spec_io.hpp"
