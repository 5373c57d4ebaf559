/* early exit once a pass makes no swap */
void bubbleSort(int data[], int size)
{
    int swapped = 1;
    while (swapped) {
        swapped = 0;
        for (int k = 1; k < size; k++) {
            if (data[k - 1] > data[k]) {
                int hold = data[k];
                data[k] = data[k - 1];
                data[k - 1] = hold;
                swapped = 1;
            }
        }
        size--;
    }
}
