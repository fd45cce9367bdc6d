int g0 = 4;
int g1 = 0;
double gd0 = 0.0;

long gen_fn(int pa, long pb) {
    long xv0 = (((long)((unsigned long)(100) >> (g0 & 15))) + (-(g0)));
    if ((-5 % 9) <= (~(10))) {
        if ((12 + pb) < (pa / 5)) {
            long xv1 = (~(-1));
        }
        unsigned xv2 = ((g0 / 7) | (4 == g0));
    }
    int xv3 = ((-(pb)) + (~(xv0)));
    if ((xv3 / 9) < -5) {
        int xw4 = 0;
        while (xw4 < 7) {
            long xv5 = xv3;
            xw4 = xw4 + 1;
        }
    }
    return (((long)(g1) * 1000003 + (long)(xv0)) ^ (long)(xv0));
}
