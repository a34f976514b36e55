#pragma once

#include "mappcf/core.hpp"
#include "mappcf/pathfind.hpp"
#include "mappcf/exec.hpp"
#include "mappcf/verify.hpp"
#include "mappcf/dcrf.hpp"
#include "mappcf/disjoint.hpp"
#include "mappcf/gen.hpp"
#include "mappcf/io.hpp"
#include "mappcf/cli.hpp"
