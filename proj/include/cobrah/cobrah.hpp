#ifndef COBRAH_COBRAH_HPP
#define COBRAH_COBRAH_HPP

#include "cohort.hpp"
#include "config.hpp"
#include "divergence.hpp"
#include "error.hpp"
#include "estimation.hpp"
#include "model.hpp"
#include "observation.hpp"
#include "policies.hpp"
#include "rng.hpp"
#include "selection.hpp"
#include "simulation.hpp"

#endif
