#pragma once

#include "pxp/hilbert.hpp"
#include "pxp/operators.hpp"
#include "pxp/spectra.hpp"
#include "pxp/scars.hpp"
#include "pxp/states.hpp"
#include "pxp/entanglement.hpp"
#include "pxp/ergotropy.hpp"
#include "pxp/dynamics.hpp"
#include "pxp/analytics.hpp"
#include "pxp/fits.hpp"
