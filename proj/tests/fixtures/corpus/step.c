#include "util.h"

struct ops {
    void (*callback)(int);
};

extern struct ops *ops_ptr;

void step(int i)
{
    struct ops o = { 0 };
    o.callback(i);
    ops_ptr->callback(i);
    dispatch();
}
