#pragma once

#include "fpnet/cli.hpp"
#include "fpnet/elements.hpp"
#include "fpnet/engine.hpp"
#include "fpnet/error.hpp"
#include "fpnet/graph.hpp"
#include "fpnet/interconnect.hpp"
#include "fpnet/io.hpp"
#include "fpnet/monitor.hpp"
#include "fpnet/oracles.hpp"
#include "fpnet/pair_transform.hpp"
#include "fpnet/problems.hpp"
#include "fpnet/simplex.hpp"
#include "fpnet/trace.hpp"
