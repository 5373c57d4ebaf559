double inner_product(double *u, double *v, int n)
{
    double acc = 0.0;
    for (int k = 0; k < n; k++)
        acc += u[k] * v[k];
    return acc;
}
