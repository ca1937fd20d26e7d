#pragma once

#include "setproc/error.hpp"
#include "setproc/numeric.hpp"
#include "setproc/parallel.hpp"
#include "setproc/random.hpp"
#include "setproc/core.hpp"
#include "setproc/models.hpp"
#include "setproc/learn.hpp"
#include "setproc/classify.hpp"
#include "setproc/novelty.hpp"
#include "setproc/cluster_em.hpp"
#include "setproc/cluster_dp.hpp"
#include "setproc/metrics.hpp"
#include "setproc/scenario.hpp"
#include "setproc/io.hpp"
