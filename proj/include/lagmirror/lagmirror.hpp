#pragma once

#include "errors.hpp"
#include "quadrature.hpp"
#include "geometry.hpp"
#include "localsys.hpp"
#include "object.hpp"
#include "fourier.hpp"
#include "floer.hpp"
#include "banded_svd.hpp"
#include "derham.hpp"
#include "scene.hpp"
#include "verify.hpp"
#include "render.hpp"
