#ifndef NETFRAK_NETFRAK_HPP
#define NETFRAK_NETFRAK_HPP

#include "netfrak/analysis.hpp"
#include "netfrak/envelope.hpp"
#include "netfrak/error.hpp"
#include "netfrak/geometry.hpp"
#include "netfrak/intensity.hpp"
#include "netfrak/io.hpp"
#include "netfrak/metric.hpp"
#include "netfrak/parallel.hpp"
#include "netfrak/rng.hpp"
#include "netfrak/simulate.hpp"
#include "netfrak/summaries.hpp"
#include "netfrak/svg.hpp"

#endif  // NETFRAK_NETFRAK_HPP
