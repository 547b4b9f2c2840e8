#ifndef SABRGHQ_SABRGHQ_HPP
#define SABRGHQ_SABRGHQ_HPP

#include "sabrghq/cev.hpp"
#include "sabrghq/errors.hpp"
#include "sabrghq/monte_carlo.hpp"
#include "sabrghq/quadrature.hpp"
#include "sabrghq/repro.hpp"
#include "sabrghq/sabr.hpp"
#include "sabrghq/sabr_params.hpp"
#include "sabrghq/specfun.hpp"
#include "sabrghq/vol.hpp"

#endif  // SABRGHQ_SABRGHQ_HPP
