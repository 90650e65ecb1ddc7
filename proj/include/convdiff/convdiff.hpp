#pragma once

#include "convdiff/error.hpp"
#include "convdiff/fd1d.hpp"
#include "convdiff/fd2d.hpp"
#include "convdiff/fem2d.hpp"
#include "convdiff/harness.hpp"
#include "convdiff/io.hpp"
#include "convdiff/linalg.hpp"
#include "convdiff/mesh.hpp"
#include "convdiff/problems.hpp"
