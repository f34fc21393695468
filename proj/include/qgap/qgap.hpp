#pragma once

// Umbrella include for the whole toolkit.

#include "qgap/classical.hpp"
#include "qgap/config.hpp"
#include "qgap/eig.hpp"
#include "qgap/errors.hpp"
#include "qgap/graph.hpp"
#include "qgap/matrix.hpp"
#include "qgap/npa.hpp"
#include "qgap/operators.hpp"
#include "qgap/parallel.hpp"
#include "qgap/report.hpp"
#include "qgap/sdp.hpp"
#include "qgap/seesaw.hpp"
#include "qgap/sequential.hpp"
#include "qgap/theta.hpp"
