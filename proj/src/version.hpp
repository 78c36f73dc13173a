#pragma once

#define ALSM_VERSION_STRING "0.1.0"
