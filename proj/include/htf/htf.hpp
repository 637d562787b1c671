#pragma once

#include "htf/analysis.hpp"
#include "htf/catalog.hpp"
#include "htf/checks.hpp"
#include "htf/clifford.hpp"
#include "htf/engine.hpp"
#include "htf/geometry.hpp"
#include "htf/models.hpp"
