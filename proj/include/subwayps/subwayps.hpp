#pragma once

#include "subwayps/detector.hpp"
#include "subwayps/error.hpp"
#include "subwayps/eval.hpp"
#include "subwayps/io.hpp"
#include "subwayps/params.hpp"
#include "subwayps/pipeline.hpp"
#include "subwayps/route.hpp"
#include "subwayps/signal.hpp"
#include "subwayps/simulate.hpp"
#include "subwayps/trip.hpp"
